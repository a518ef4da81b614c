#pragma once

#include "cptrrt/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace cptrrt {

// Perception parameters: alpha, beta shape the Prelec weighting; gamma, lambda the
// cost utility.
struct CptParams {
  double alpha = 0.74;
  double beta = 1.0;
  double gamma = 0.88;
  double lambda = 2.25;

  void validate() const;
  VectorXd to_vector() const;
  static CptParams from_vector(const Eigen::Ref<const VectorXd>& v);
};

// Discrete uncertain cost. Outcomes strictly descending, probabilities sum to one.
struct Prospect {
  VectorXd outcomes;
  VectorXd probs;

  Eigen::Index size() const { return outcomes.size(); }
  void validate() const;
};

template <typename Scalar>
Scalar utility_v(Scalar rho, const CptParams& params) {
  using std::pow;
  if (!(rho >= Scalar(0))) throw std::invalid_argument("utility: cost must be nonnegative");
  return Scalar(params.lambda) * pow(rho, Scalar(params.gamma));
}

// Prelec weighting, w(0) = 0 by convention.
template <typename Scalar>
Scalar prelec_w(Scalar p, const CptParams& params) {
  using std::exp;
  using std::log;
  using std::pow;
  if (!(p >= Scalar(0) && p <= Scalar(1)))
    throw std::invalid_argument("prelec: probability outside [0, 1]");
  if (p == Scalar(0)) return Scalar(0);
  return exp(-Scalar(params.beta) * pow(-log(p), Scalar(params.alpha)));
}

// Upper half-normal quantiles of |Z|, Z ~ N(0,1), at the probability midpoints of
// M equal-mass bins, highest first.
VectorXd half_normal_bin_quantiles(int bins);

// rho = rho_mu + |Normal(0, rho_sigma^2)| split into `bins` equal-mass bins.
Prospect discretize_prospect(double rho_mu, double rho_sigma, int bins);
Prospect discretize_prospect(double rho_mu, double rho_sigma,
                             const Eigen::Ref<const VectorXd>& unit_quantiles);

VectorXd decision_weights(const Eigen::Ref<const VectorXd>& probs, const CptParams& params);

double cpt_risk(const Prospect& prospect, const CptParams& params);
double expected_risk(const Prospect& prospect);
double cvar_risk(const Prospect& prospect, double q);

struct ExpectedModel {};
struct CptModel {
  CptParams params;
};
struct CvarModel {
  double q = 0.0;
};

using RiskModel = std::variant<ExpectedModel, CptModel, CvarModel>;

void validate_model(const RiskModel& model);
double perceived_risk(const Prospect& prospect, const RiskModel& model);

// Compact, whitespace-free tag: "expected", "cpt:a,b,g,l", "cvar:q".
std::string model_tag(const RiskModel& model);
RiskModel parse_model_tag(const std::string& tag);

}  // namespace cptrrt
