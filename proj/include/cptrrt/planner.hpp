#pragma once

#include "cptrrt/risk_field.hpp"
#include "cptrrt/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace cptrrt {

struct PlannerConfig {
  Point start = Point::Zero();
  Point goal = Point::Zero();
  int iterations = 20000;
  double delta = 1e-4;            // urgency weight on path length
  double steer_distance = 0.35;
  double gamma_rrt = 100.0;
  std::uint64_t seed = 0;

  void validate(const ConfigSpace& space) const;
};

struct Tree {
  static constexpr std::ptrdiff_t kNoParent = -1;

  std::vector<Point> nodes;
  std::vector<std::ptrdiff_t> parent;
  std::vector<std::vector<std::size_t>> children;
  std::vector<double> j_cum;
  std::vector<double> risk;       // perceived risk at each node
  std::vector<double> edge_cost;  // cost of the edge from the parent, 0 at the root

  std::size_t size() const { return nodes.size(); }
  std::size_t add(const Point& x, std::ptrdiff_t par, double r, double edge, double j);

  // Same nodes, parents and cumulative costs, bit for bit.
  bool same_as(const Tree& other) const;
};

// max{0, R(x2) - R(x1)} + delta * |x2 - x1|. Asymmetric: downhill moves only pay length.
double edge_cost(const Point& x1, const Point& x2, const RiskField& risk, double delta);

inline double edge_cost_from_risk(double r1, double r2, const Point& x1, const Point& x2,
                                  double delta) {
  const double rise = r2 - r1;
  return (rise > 0.0 ? rise : 0.0) + delta * (x2 - x1).norm();
}

double path_cost(const Path& path, const RiskField& risk, double delta);

Point steer(const Point& from, const Point& toward, double d);

// min(gamma * (ln n / n)^(1/dim), d); d for n <= 1.
double near_radius(std::size_t n, int dim, double gamma_rrt, double d);

// Uniform bucket grid over a 2D box. Queries return exact Euclidean answers;
// ties break toward the lowest node index.
class NodeIndex {
 public:
  NodeIndex(const ConfigSpace& space, double cell_size);

  void insert(std::size_t id, const Point& p);
  std::size_t size() const { return points_.size(); }

  // Throws std::logic_error when empty.
  std::size_t nearest(const Point& q) const;
  // Ids with |p - q| <= radius, ascending.
  std::vector<std::size_t> within(const Point& q, double radius) const;

 private:
  int cell_x(double x) const;
  int cell_y(double y) const;

  Point lower_;
  double cell_;
  int nx_, ny_;
  std::vector<std::vector<std::size_t>> buckets_;
  std::vector<Point> points_;
};

struct PlanHooks {
  // Optional hard-obstacle test; a node is not added when it returns true.
  std::function<bool(const Point&)> reject_node;
  // Called after every `checkpoint_every` iterations (and never when 0).
  std::size_t checkpoint_every = 0;
  std::function<void(int iteration, const Tree& tree)> on_checkpoint;
};

struct PlanResult {
  Tree tree;
  Path path;
};

PlanResult plan(const ConfigSpace& space, const RiskField& risk, const PlannerConfig& cfg,
                const PlanHooks& hooks = {});

// Root-first path to the tree node nearest `goal`.
Path extract_path(const Tree& tree, const Point& goal);

// Appends `goal` when the path does not already end there (synthetic snap edge).
Path with_goal_snap(Path path, const Point& goal);

// Cheapest way to reach `goal` exactly: min over nodes within `radius` of goal of
// J_cum(node) + edge(node, goal). Infinity when no node qualifies.
double best_goal_cost(const Tree& tree, const Point& goal, const RiskField& risk, double delta,
                      double radius);

}  // namespace cptrrt
