#pragma once

#include "cptrrt/types.hpp"

#include <cmath>
#include <utility>
#include <variant>
#include <vector>

namespace cptrrt {

namespace bump {

// Smooth step primitives. f vanishes with all derivatives at 0, so the
// blend g is C-infinity and exactly 0 for y <= 0, exactly 1 for y >= 1.
template <typename Scalar>
Scalar f(Scalar y) {
  using std::exp;
  return y > Scalar(0) ? exp(Scalar(-1) / y) : Scalar(0);
}

template <typename Scalar>
Scalar g(Scalar y) {
  const Scalar fy = f(y);
  const Scalar fc = f(Scalar(1) - y);
  return fy / (fy + fc);
}

// 1 on |y| <= inner, 0 on |y| >= outer, smooth in between.
template <typename Scalar>
Scalar h(Scalar y, Scalar inner, Scalar outer) {
  const Scalar a2 = inner * inner;
  return Scalar(1) - g((y * y - a2) / (outer * outer - a2));
}

}  // namespace bump

// Axis-aligned soft obstacle: rho_max on the inner box, zero outside the outer box.
struct BumpObstacle {
  VectorXd center;
  VectorXd inner;  // per-axis half widths a_i
  VectorXd outer;  // per-axis half widths b_i > a_i
  double rho_max = 0.0;

  void validate() const;
};

// Unnormalized Gaussian blob; `amplitude` is the peak value.
class GaussianSource {
 public:
  GaussianSource(VectorXd mean, MatrixXd covariance, double amplitude);

  const VectorXd& mean() const { return mean_; }
  const MatrixXd& covariance() const { return covariance_; }
  double amplitude() const { return amplitude_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  // Squared Mahalanobis distance to the mean.
  double mahalanobis2(const Eigen::Ref<const VectorXd>& x) const;

 private:
  VectorXd mean_;
  MatrixXd covariance_;
  Eigen::LLT<MatrixXd> llt_;
  double amplitude_;
};

double bump_mean(const Eigen::Ref<const VectorXd>& x, const BumpObstacle& obstacle);
double gaussian_value(const Eigen::Ref<const VectorXd>& x, const GaussianSource& source);

using MeanTerm = std::variant<BumpObstacle, GaussianSource>;

struct Moments {
  double mu = 0.0;
  double sigma = 0.0;
};

struct CostField {
  ConfigSpace space;
  std::vector<MeanTerm> mean_terms;
  std::vector<GaussianSource> sigma_terms;

  CostField() = default;
  explicit CostField(ConfigSpace s) : space(std::move(s)) {}

  // Checks every term against the space dimension and its own invariants.
  void validate() const;
};

// Throws std::out_of_range for points outside field.space.
Moments eval_moments(const CostField& field, const Eigen::Ref<const VectorXd>& x);

}  // namespace cptrrt
