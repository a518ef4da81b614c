#include "cptrrt/cost_field.hpp"

#include <stdexcept>
#include <string>

namespace cptrrt {

void BumpObstacle::validate() const {
  const auto n = center.size();
  if (n == 0 || inner.size() != n || outer.size() != n)
    throw std::invalid_argument("bump: center, inner and outer must share a non-zero dimension");
  if (!std::isfinite(rho_max) || rho_max < 0.0)
    throw std::invalid_argument("bump: rho_max must be finite and nonnegative");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(inner[i] > 0.0) || !(outer[i] > inner[i]) || !std::isfinite(outer[i]))
      throw std::invalid_argument("bump: axis " + std::to_string(i) +
                                  " requires 0 < inner < outer");
  }
}

GaussianSource::GaussianSource(VectorXd mean, MatrixXd covariance, double amplitude)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), amplitude_(amplitude) {
  const auto n = mean_.size();
  if (n == 0 || covariance_.rows() != n || covariance_.cols() != n)
    throw std::invalid_argument("gaussian: covariance must be dim x dim");
  if (!std::isfinite(amplitude_) || amplitude_ < 0.0)
    throw std::invalid_argument("gaussian: amplitude must be finite and nonnegative");
  if (!covariance_.isApprox(covariance_.transpose(), 1e-12))
    throw std::invalid_argument("gaussian: covariance is not symmetric");
  llt_.compute(covariance_);
  if (llt_.info() != Eigen::Success)
    throw std::invalid_argument("gaussian: covariance is not positive definite");
}

double GaussianSource::mahalanobis2(const Eigen::Ref<const VectorXd>& x) const {
  const VectorXd z = llt_.matrixL().solve(x - mean_);
  return z.squaredNorm();
}

double bump_mean(const Eigen::Ref<const VectorXd>& x, const BumpObstacle& obstacle) {
  obstacle.validate();
  if (x.size() != obstacle.center.size())
    throw std::invalid_argument("bump: point dimension mismatch");
  double value = obstacle.rho_max;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument("bump: point is not finite");
    value *= bump::h(x[i] - obstacle.center[i], obstacle.inner[i], obstacle.outer[i]);
  }
  return value;
}

double gaussian_value(const Eigen::Ref<const VectorXd>& x, const GaussianSource& source) {
  if (x.size() != source.dim()) throw std::invalid_argument("gaussian: point dimension mismatch");
  if (source.amplitude() == 0.0) return 0.0;
  return source.amplitude() * std::exp(-0.5 * source.mahalanobis2(x));
}

void CostField::validate() const {
  space.validate();
  const int n = space.dim();
  for (const auto& term : mean_terms) {
    std::visit(
        [n](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, BumpObstacle>) {
            t.validate();
            if (t.center.size() != n) throw std::invalid_argument("bump: dimension mismatch");
          } else {
            if (t.dim() != n) throw std::invalid_argument("gaussian: dimension mismatch");
          }
        },
        term);
  }
  for (const auto& s : sigma_terms)
    if (s.dim() != n) throw std::invalid_argument("gaussian: dimension mismatch");
}

Moments eval_moments(const CostField& field, const Eigen::Ref<const VectorXd>& x) {
  if (!field.space.contains(x))
    throw std::out_of_range("cost field: point outside the configuration space");
  Moments m;
  for (const auto& term : field.mean_terms) {
    m.mu += std::visit(
        [&x](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, BumpObstacle>)
            return bump_mean(x, t);
          else
            return gaussian_value(x, t);
        },
        term);
  }
  for (const auto& s : field.sigma_terms) m.sigma += gaussian_value(x, s);
  return m;
}

}  // namespace cptrrt
