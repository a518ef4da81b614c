#include "cptrrt/planner.hpp"

#include "cptrrt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cptrrt {

void PlannerConfig::validate(const ConfigSpace& space) const {
  if (space.dim() != 2) throw std::invalid_argument("planner: only 2D spaces are supported");
  if (!space.contains(start)) throw std::invalid_argument("planner: start outside the space");
  if (!space.contains(goal)) throw std::invalid_argument("planner: goal outside the space");
  if (iterations < 1) throw std::invalid_argument("planner: iterations must be >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("planner: delta must be >= 0");
  if (!(steer_distance > 0.0) || !std::isfinite(steer_distance))
    throw std::invalid_argument("planner: steer distance must be > 0");
  if (!(gamma_rrt > 0.0) || !std::isfinite(gamma_rrt))
    throw std::invalid_argument("planner: gamma_rrt must be > 0");
}

std::size_t Tree::add(const Point& x, std::ptrdiff_t par, double r, double edge, double j) {
  const std::size_t id = nodes.size();
  nodes.push_back(x);
  parent.push_back(par);
  children.emplace_back();
  j_cum.push_back(j);
  risk.push_back(r);
  edge_cost.push_back(edge);
  if (par != kNoParent) children[static_cast<std::size_t>(par)].push_back(id);
  return id;
}

bool Tree::same_as(const Tree& other) const {
  return nodes == other.nodes && parent == other.parent && j_cum == other.j_cum;
}

double edge_cost(const Point& x1, const Point& x2, const RiskField& risk, double delta) {
  return edge_cost_from_risk(risk.at(x1), risk.at(x2), x1, x2, delta);
}

double path_cost(const Path& path, const RiskField& risk, double delta) {
  double c = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    c += edge_cost(path.waypoints[i - 1], path.waypoints[i], risk, delta);
  return c;
}

Point steer(const Point& from, const Point& toward, double d) {
  const Point diff = toward - from;
  const double len = diff.norm();
  if (len <= d) return toward;
  return from + d * diff / len;
}

double near_radius(std::size_t n, int dim, double gamma_rrt, double d) {
  if (n <= 1) return d;
  const double nn = static_cast<double>(n);
  return std::min(gamma_rrt * std::pow(std::log(nn) / nn, 1.0 / dim), d);
}

NodeIndex::NodeIndex(const ConfigSpace& space, double cell_size)
    : lower_(space.lower[0], space.lower[1]), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("node index: cell size must be positive");
  nx_ = std::max(1, static_cast<int>(std::ceil((space.upper[0] - space.lower[0]) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((space.upper[1] - space.lower[1]) / cell_)));
  buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
}

int NodeIndex::cell_x(double x) const {
  return std::clamp(static_cast<int>(std::floor((x - lower_[0]) / cell_)), 0, nx_ - 1);
}

int NodeIndex::cell_y(double y) const {
  return std::clamp(static_cast<int>(std::floor((y - lower_[1]) / cell_)), 0, ny_ - 1);
}

void NodeIndex::insert(std::size_t id, const Point& p) {
  if (id != points_.size()) throw std::logic_error("node index: ids must be inserted in order");
  points_.push_back(p);
  buckets_[static_cast<std::size_t>(cell_y(p.y())) * nx_ + cell_x(p.x())].push_back(id);
}

std::size_t NodeIndex::nearest(const Point& q) const {
  if (points_.empty()) throw std::logic_error("node index: nearest on an empty index");
  const int cx = cell_x(q.x());
  const int cy = cell_y(q.y());
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  const int max_ring = std::max(nx_, ny_);
  for (int ring = 0; ring <= max_ring; ++ring) {
    for (int iy = cy - ring; iy <= cy + ring; ++iy) {
      if (iy < 0 || iy >= ny_) continue;
      const bool edge_row = iy == cy - ring || iy == cy + ring;
      for (int ix = cx - ring; ix <= cx + ring; ix += edge_row ? 1 : 2 * ring) {
        if (ix >= 0 && ix < nx_) {
          for (std::size_t id : buckets_[static_cast<std::size_t>(iy) * nx_ + ix]) {
            const double d2 = (points_[id] - q).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
              best_d2 = d2;
              best = id;
            }
          }
        }
        if (ring == 0) break;
      }
    }
    // Cells in later rings are at least ring * cell_ away; strict so ties are still seen.
    const double reach = ring * cell_;
    if (best != std::numeric_limits<std::size_t>::max() && best_d2 < reach * reach) break;
  }
  return best;
}

std::vector<std::size_t> NodeIndex::within(const Point& q, double radius) const {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  const int x0 = cell_x(q.x() - radius), x1 = cell_x(q.x() + radius);
  const int y0 = cell_y(q.y() - radius), y1 = cell_y(q.y() + radius);
  for (int iy = y0; iy <= y1; ++iy)
    for (int ix = x0; ix <= x1; ++ix)
      for (std::size_t id : buckets_[static_cast<std::size_t>(iy) * nx_ + ix])
        if ((points_[id] - q).squaredNorm() <= r2) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void reparent(Tree& tree, std::size_t node, std::size_t new_parent, double edge) {
  auto& old_children = tree.children[static_cast<std::size_t>(tree.parent[node])];
  old_children.erase(std::find(old_children.begin(), old_children.end(), node));
  tree.parent[node] = static_cast<std::ptrdiff_t>(new_parent);
  tree.children[new_parent].push_back(node);
  tree.edge_cost[node] = edge;
  tree.j_cum[node] = tree.j_cum[new_parent] + edge;

  // Whole subtree, so every descendant stays additive.
  std::vector<std::size_t> stack(tree.children[node].begin(), tree.children[node].end());
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    tree.j_cum[n] = tree.j_cum[static_cast<std::size_t>(tree.parent[n])] + tree.edge_cost[n];
    stack.insert(stack.end(), tree.children[n].begin(), tree.children[n].end());
  }
}

}  // namespace

PlanResult plan(const ConfigSpace& space, const RiskField& risk, const PlannerConfig& cfg,
                const PlanHooks& hooks) {
  space.validate();
  cfg.validate(space);
  for (int i = 0; i < 2; ++i) {
    if (space.lower[i] < risk.space().lower[i] || space.upper[i] > risk.space().upper[i])
      throw std::invalid_argument("planner: risk field does not cover the configuration space");
  }

  Engine eng(cfg.seed);
  const Point lo(space.lower[0], space.lower[1]);
  const Point span(space.upper[0] - space.lower[0], space.upper[1] - space.lower[1]);
  const double d = cfg.steer_distance;

  PlanResult result;
  Tree& tree = result.tree;
  NodeIndex index(space, d);
  tree.add(cfg.start, Tree::kNoParent, risk.at(cfg.start), 0.0, 0.0);
  index.insert(0, cfg.start);

  for (int it = 1; it <= cfg.iterations; ++it) {
    const double ux = unit_uniform(eng);
    const double uy = unit_uniform(eng);
    const Point x_rand(lo[0] + ux * span[0], lo[1] + uy * span[1]);

    const std::size_t nearest = index.nearest(x_rand);
    const Point x_new = steer(tree.nodes[nearest], x_rand, d);
    const bool usable = x_new != tree.nodes[nearest] && !(hooks.reject_node && hooks.reject_node(x_new));

    if (usable) {
      const double r_new = risk.at(x_new);
      const double radius = near_radius(tree.size() + 1, 2, cfg.gamma_rrt, d);
      const std::vector<std::size_t> near = index.within(x_new, radius);

      std::size_t best = nearest;
      double best_edge = edge_cost_from_risk(tree.risk[nearest], r_new, tree.nodes[nearest], x_new, cfg.delta);
      double c_min = tree.j_cum[nearest] + best_edge;
      for (std::size_t n : near) {
        const double e = edge_cost_from_risk(tree.risk[n], r_new, tree.nodes[n], x_new, cfg.delta);
        const double c = tree.j_cum[n] + e;
        if (c < c_min) {
          c_min = c;
          best = n;
          best_edge = e;
        }
      }

      const std::size_t id =
          tree.add(x_new, static_cast<std::ptrdiff_t>(best), r_new, best_edge, c_min);
      index.insert(id, x_new);

      for (std::size_t n : near) {
        if (n == best) continue;
        const double e = edge_cost_from_risk(r_new, tree.risk[n], x_new, tree.nodes[n], cfg.delta);
        const double c = tree.j_cum[id] + e;
        if (c < tree.j_cum[n]) reparent(tree, n, id, e);
      }
    }

    if (hooks.checkpoint_every && hooks.on_checkpoint &&
        it % static_cast<int>(hooks.checkpoint_every) == 0)
      hooks.on_checkpoint(it, tree);
  }

  result.path = extract_path(tree, cfg.goal);
  return result;
}

Path extract_path(const Tree& tree, const Point& goal) {
  if (tree.size() == 0) throw std::invalid_argument("extract_path: empty tree");
  std::size_t best = 0;
  double best_d2 = (tree.nodes[0] - goal).squaredNorm();
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const double d2 = (tree.nodes[i] - goal).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  Path path;
  for (std::ptrdiff_t n = static_cast<std::ptrdiff_t>(best); n != Tree::kNoParent;
       n = tree.parent[static_cast<std::size_t>(n)])
    path.waypoints.push_back(tree.nodes[static_cast<std::size_t>(n)]);
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

Path with_goal_snap(Path path, const Point& goal) {
  if (path.empty() || path.back() != goal) path.waypoints.push_back(goal);
  return path;
}

double best_goal_cost(const Tree& tree, const Point& goal, const RiskField& risk, double delta,
                      double radius) {
  const double r_goal = risk.at(goal);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if ((tree.nodes[i] - goal).norm() > radius) continue;
    best = std::min(best, tree.j_cum[i] + edge_cost_from_risk(tree.risk[i], r_goal, tree.nodes[i], goal, delta));
  }
  return best;
}

}  // namespace cptrrt
