#include "cptrrt/path_metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace cptrrt {

double arc_length(const Path& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    len += (path.waypoints[i] - path.waypoints[i - 1]).norm();
  return len;
}

namespace {

bool lex_less(const Path& a, const Path& b) {
  return std::lexicographical_compare(
      a.waypoints.begin(), a.waypoints.end(), b.waypoints.begin(), b.waypoints.end(),
      [](const Point& p, const Point& q) {
        return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
      });
}

}  // namespace

double area_between(const Path& a, const Path& b, double endpoint_tol) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("area_between: paths need at least two waypoints");
  if ((a.front() - b.front()).norm() > endpoint_tol || (a.back() - b.back()).norm() > endpoint_tol)
    throw std::invalid_argument("area_between: path endpoints differ by more than the tolerance");

  // Fixed traversal order makes the result exactly symmetric in its arguments.
  const Path& first = lex_less(b, a) ? b : a;
  const Path& second = &first == &a ? b : a;

  // Loop = first, closing edge, second reversed, closing edge. Each path's edges are
  // summed on their own so identical paths cancel exactly.
  const Point o = first.front();
  auto cross = [&o](const Point& p, const Point& q) {
    const Point u = p - o, v = q - o;
    return u.x() * v.y() - v.x() * u.y();
  };
  auto edges = [&cross](const Path& p) {
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) acc += cross(p.waypoints[i - 1], p.waypoints[i]);
    return acc;
  };
  const double twice = (edges(first) - edges(second)) + cross(first.back(), second.back()) +
                       cross(second.front(), first.front());
  return 0.5 * std::abs(twice);
}

}  // namespace cptrrt
