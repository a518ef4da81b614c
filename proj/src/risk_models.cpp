#include "cptrrt/risk_models.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <sstream>
#include <vector>

namespace cptrrt {

namespace {

constexpr double kProbSumTol = 1e-12;

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("malformed number: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

void CptParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("cpt: alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("cpt: beta must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("cpt: gamma must lie in (0, 1)");
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw std::invalid_argument("cpt: lambda must be > 1");
}

VectorXd CptParams::to_vector() const {
  VectorXd v(4);
  v << alpha, beta, gamma, lambda;
  return v;
}

CptParams CptParams::from_vector(const Eigen::Ref<const VectorXd>& v) {
  if (v.size() != 4) throw std::invalid_argument("cpt: parameter vector must have 4 entries");
  return CptParams{v[0], v[1], v[2], v[3]};
}

void Prospect::validate() const {
  const auto m = outcomes.size();
  if (m < 1 || probs.size() != m)
    throw std::invalid_argument("prospect: need matching, non-empty outcomes and probs");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(outcomes[i]) || outcomes[i] < 0.0)
      throw std::invalid_argument("prospect: outcomes must be finite and nonnegative");
    if (!(probs[i] >= 0.0)) throw std::invalid_argument("prospect: negative probability");
    if (i > 0 && !(outcomes[i] < outcomes[i - 1]))
      throw std::invalid_argument("prospect: outcomes must be strictly descending");
  }
  if (std::abs(probs.sum() - 1.0) > kProbSumTol)
    throw std::invalid_argument("prospect: probabilities do not sum to one");
}

VectorXd half_normal_bin_quantiles(int bins) {
  if (bins < 1) throw std::invalid_argument("discretize: bin count must be positive");
  VectorXd z(bins);
  const double m = bins;
  for (int i = 0; i < bins; ++i) {
    // Bin i (0-based, worst first) covers probability levels [1 - (i+1)/M, 1 - i/M].
    const double level = 1.0 - (i + 0.5) / m;
    // |Z| has CDF erf(y / sqrt 2).
    z[i] = std::sqrt(2.0) * boost::math::erf_inv(level);
  }
  return z;
}

Prospect discretize_prospect(double rho_mu, double rho_sigma,
                             const Eigen::Ref<const VectorXd>& unit_quantiles) {
  if (!(rho_mu >= 0.0) || !std::isfinite(rho_mu))
    throw std::invalid_argument("discretize: rho_mu must be finite and nonnegative");
  if (!(rho_sigma >= 0.0) || !std::isfinite(rho_sigma))
    throw std::invalid_argument("discretize: rho_sigma must be finite and nonnegative");
  const auto bins = unit_quantiles.size();
  if (bins < 1) throw std::invalid_argument("discretize: bin count must be positive");

  Prospect out;
  if (rho_sigma == 0.0) {
    out.outcomes = VectorXd::Constant(1, rho_mu);
    out.probs = VectorXd::Ones(1);
    return out;
  }

  // Collapse outcomes that coincide in floating point, keeping the mass.
  std::vector<double> values;
  std::vector<double> mass;
  values.reserve(bins);
  mass.reserve(bins);
  const double p = 1.0 / static_cast<double>(bins);
  for (Eigen::Index i = 0; i < bins; ++i) {
    const double v = rho_mu + rho_sigma * unit_quantiles[i];
    if (!values.empty() && !(v < values.back())) {
      mass.back() += p;
    } else {
      values.push_back(v);
      mass.push_back(p);
    }
  }
  out.outcomes = Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  out.probs = Eigen::Map<const VectorXd>(mass.data(), static_cast<Eigen::Index>(mass.size()));
  if (out.size() == 1) out.probs[0] = 1.0;
  return out;
}

Prospect discretize_prospect(double rho_mu, double rho_sigma, int bins) {
  return discretize_prospect(rho_mu, rho_sigma, half_normal_bin_quantiles(bins));
}

VectorXd decision_weights(const Eigen::Ref<const VectorXd>& probs, const CptParams& params) {
  const auto m = probs.size();
  if (m < 1) throw std::invalid_argument("decision weights: empty probability vector");
  if ((probs.array() < 0.0).any())
    throw std::invalid_argument("decision weights: negative probability");
  if (std::abs(probs.sum() - 1.0) > kProbSumTol)
    throw std::invalid_argument("decision weights: probabilities are not normalized");

  // tail[j] = S_{j+1} = sum_{i >= j} p_i (0-based), tail[m] = 0, tail[0] = 1 exactly.
  VectorXd tail(m + 1);
  tail[m] = 0.0;
  for (Eigen::Index j = m - 1; j > 0; --j) tail[j] = std::min(1.0, tail[j + 1] + probs[j]);
  tail[0] = 1.0;

  VectorXd w(m + 1);
  for (Eigen::Index j = 0; j <= m; ++j) w[j] = prelec_w(tail[j], params);
  VectorXd pi(m);
  for (Eigen::Index j = 0; j < m; ++j) pi[j] = w[j] - w[j + 1];
  return pi;
}

double cpt_risk(const Prospect& prospect, const CptParams& params) {
  prospect.validate();
  params.validate();
  const VectorXd pi = decision_weights(prospect.probs, params);
  double r = 0.0;
  for (Eigen::Index j = 0; j < prospect.size(); ++j) r += utility_v(prospect.outcomes[j], params) * pi[j];
  return r;
}

double expected_risk(const Prospect& prospect) {
  prospect.validate();
  return prospect.outcomes.dot(prospect.probs);
}

double cvar_risk(const Prospect& prospect, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("cvar: q must lie in [0, 1)");
  prospect.validate();
  const double tail = 1.0 - q;
  // Boundary outcome k holds the mass at level q. The tail mean is rho_k plus the
  // excess of the outcomes above it spread over the tail, which keeps the result
  // monotone in q under rounding.
  const Eigen::Index n = prospect.size();
  Eigen::Index k = 0;
  double above = 0.0;
  while (k + 1 < n && above + prospect.probs[k] < tail) above += prospect.probs[k++];
  const double rho_k = prospect.outcomes[k];
  double excess = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) excess += prospect.probs[i] * (prospect.outcomes[i] - rho_k);
  return rho_k + excess / tail;
}

void validate_model(const RiskModel& model) {
  if (const auto* c = std::get_if<CptModel>(&model)) c->params.validate();
  if (const auto* v = std::get_if<CvarModel>(&model)) {
    if (!(v->q >= 0.0 && v->q < 1.0)) throw std::invalid_argument("cvar: q must lie in [0, 1)");
  }
}

double perceived_risk(const Prospect& prospect, const RiskModel& model) {
  return std::visit(
      [&prospect](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExpectedModel>)
          return expected_risk(prospect);
        else if constexpr (std::is_same_v<T, CptModel>)
          return cpt_risk(prospect, m.params);
        else
          return cvar_risk(prospect, m.q);
      },
      model);
}

std::string model_tag(const RiskModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExpectedModel>)
          return "expected";
        else if constexpr (std::is_same_v<T, CptModel>)
          return "cpt:" + format_double(m.params.alpha) + "," + format_double(m.params.beta) + "," +
                 format_double(m.params.gamma) + "," + format_double(m.params.lambda);
        else
          return "cvar:" + format_double(m.q);
      },
      model);
}

RiskModel parse_model_tag(const std::string& tag) {
  if (tag == "expected") return ExpectedModel{};
  const auto colon = tag.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown risk model tag: " + tag);
  const std::string kind = tag.substr(0, colon);
  const auto values = parse_csv_doubles(tag.substr(colon + 1));
  RiskModel model;
  if (kind == "cpt" && values.size() == 4) {
    model = CptModel{CptParams{values[0], values[1], values[2], values[3]}};
  } else if (kind == "cvar" && values.size() == 1) {
    model = CvarModel{values[0]};
  } else {
    throw std::invalid_argument("unknown risk model tag: " + tag);
  }
  validate_model(model);
  return model;
}

}  // namespace cptrrt
