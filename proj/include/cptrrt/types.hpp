#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace cptrrt {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using VectorXd = VecX<double>;
using MatrixXd = MatX<double>;
using Point = Vec2<double>;

// Axis-aligned box [lower, upper] in world units.
struct ConfigSpace {
  VectorXd lower;
  VectorXd upper;

  ConfigSpace() = default;
  ConfigSpace(VectorXd lo, VectorXd hi);

  static ConfigSpace square(double lo, double hi, int dim = 2);

  int dim() const { return static_cast<int>(lower.size()); }
  VectorXd extent() const { return upper - lower; }

  // Throws std::invalid_argument when the bounds are malformed.
  void validate() const;

  bool contains(const Eigen::Ref<const VectorXd>& x, double tol = 0.0) const;

  std::string describe() const;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct Path {
  std::vector<Point> waypoints;

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
  const Point& front() const { return waypoints.front(); }
  const Point& back() const { return waypoints.back(); }
};

}  // namespace cptrrt
