#include "cptrrt/spsa.hpp"

#include "cptrrt/path_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace cptrrt {

SpsaGains spsa_gains(int k) {
  if (k < 1) throw std::invalid_argument("spsa: iteration index must be >= 1");
  const double base = 1.6 + k;
  return {0.4 / std::pow(base, 0.601), 0.97 / std::pow(base, 0.301)};
}

void ParamBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw std::invalid_argument("spsa: bounds must be non-empty and matching");
  if (!(lower.array() <= upper.array()).all())
    throw std::invalid_argument("spsa: lower bound exceeds upper bound");
}

bool ParamBox::contains(const Eigen::Ref<const VectorXd>& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

VectorXd ParamBox::clamp(const Eigen::Ref<const VectorXd>& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

ParamBox ParamBox::cpt_default() {
  ParamBox b;
  b.lower = (VectorXd(4) << 0.1, 0.05, 0.1, 1.01).finished();
  b.upper = (VectorXd(4) << 2.0, 5.0, 0.99, 15.0).finished();
  return b;
}

ParamBox ParamBox::cvar_default() {
  ParamBox b;
  b.lower = VectorXd::Constant(1, 0.0);
  b.upper = VectorXd::Constant(1, 0.99);
  return b;
}

Perturbation perturb(const Eigen::Ref<const VectorXd>& theta, double c_k, const ParamBox& bounds,
                     Engine& rng) {
  Perturbation p;
  p.delta.resize(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) p.delta[i] = rademacher(rng);
  p.plus = bounds.clamp(theta + c_k * p.delta);
  p.minus = bounds.clamp(theta - c_k * p.delta);
  return p;
}

VectorXd spsa_step(const Eigen::Ref<const VectorXd>& theta, int k, double loss_plus,
                   double loss_minus, const Eigen::Ref<const VectorXd>& delta,
                   const ParamBox& bounds) {
  if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus))
    throw std::invalid_argument("spsa: losses must be finite");
  if (loss_plus == loss_minus) return bounds.clamp(theta);
  const SpsaGains g = spsa_gains(k);
  const VectorXd grad = ((loss_plus - loss_minus) / (2.0 * g.c)) * delta.cwiseInverse();
  return bounds.clamp(theta - g.a * grad);
}

void SpsaConfig::validate() const {
  bounds.validate();
  if (!(kappa > 0.0)) throw std::invalid_argument("spsa: kappa must be > 0");
  if (max_iters < 1) throw std::invalid_argument("spsa: max_iters must be >= 1");
  if (!bounds.contains(theta0)) throw std::invalid_argument("spsa: theta0 outside the bounds");
}

std::uint64_t evaluation_seed(const SpsaConfig& cfg, int k, int which) {
  if (cfg.seeding == PlannerSeeding::common || k == 0) return cfg.planner.seed;
  return derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)),
                     static_cast<std::uint64_t>(which));
}

namespace {

struct Evaluation {
  double loss;
  Path path;
};

}  // namespace

FitReport fit(const Path& target, const SpsaConfig& cfg, const RiskBuilder& build_risk) {
  cfg.validate();
  if (target.size() < 2) throw std::invalid_argument("spsa: target path needs two waypoints");

  FitReport report;
  Engine rng(cfg.seed);

  auto evaluate = [&](const VectorXd& theta, int k, int which) {
    const RiskField risk = build_risk(theta);
    ++report.plans;
    PlannerConfig pc = cfg.planner;
    pc.seed = evaluation_seed(cfg, k, which);
    const PlanResult res = plan(risk.space(), risk, pc);
    Path path = with_goal_snap(res.path, cfg.planner.goal);
    const double loss = area_between(path, target);
    return Evaluation{loss, std::move(path)};
  };

  auto keep_if_best = [&report](const VectorXd& theta, Evaluation& ev) {
    if (report.final_path.empty() || ev.loss < report.final_loss) {
      report.final_theta = theta;
      report.final_loss = ev.loss;
      report.final_path = std::move(ev.path);
    }
  };

  try {
    VectorXd theta = cfg.theta0;
    Evaluation ev = evaluate(theta, 0, 2);
    report.records.push_back({0, theta, 0.0, 0.0, ev.loss, ev.loss, ev.loss});
    keep_if_best(theta, ev);
    report.converged = report.final_loss < cfg.kappa;

    for (int k = 1; k <= cfg.max_iters && !report.converged; ++k) {
      const SpsaGains g = spsa_gains(k);
      const Perturbation p = perturb(theta, g.c, cfg.bounds, rng);
      const double loss_plus = evaluate(p.plus, k, 0).loss;
      const double loss_minus = evaluate(p.minus, k, 1).loss;
      theta = spsa_step(theta, k, loss_plus, loss_minus, p.delta, cfg.bounds);
      ev = evaluate(theta, k, 2);
      report.records.push_back({k, theta, g.a, g.c, ev.loss, loss_plus, loss_minus});
      keep_if_best(theta, ev);
      report.converged = report.final_loss < cfg.kappa;
    }
  } catch (const std::exception& e) {
    report.aborted = true;
    report.error = e.what();
  }
  return report;
}

std::vector<FitReport> fit_trials(const Path& target, const SpsaConfig& cfg,
                                  const RiskBuilder& build_risk, int trials, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("spsa: trial count must be >= 1");
  auto trial_cfg = [&cfg](int t) {
    SpsaConfig c = cfg;
    c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    return c;
  };

  std::vector<FitReport> reports(static_cast<std::size_t>(trials));
  const int workers = std::max(1, std::min(static_cast<int>(threads), trials));
  for (int begin = 0; begin < trials; begin += workers) {
    std::vector<std::future<FitReport>> pending;
    for (int t = begin; t < std::min(trials, begin + workers); ++t) {
      if (workers == 1)
        reports[static_cast<std::size_t>(t)] = fit(target, trial_cfg(t), build_risk);
      else
        pending.push_back(std::async(std::launch::async, [&, t] { return fit(target, trial_cfg(t), build_risk); }));
    }
    for (std::size_t i = 0; i < pending.size(); ++i)
      reports[static_cast<std::size_t>(begin) + i] = pending[i].get();
  }
  return reports;
}

FitSummary summarize(const std::vector<FitReport>& reports) {
  FitSummary s;
  s.trials = static_cast<int>(reports.size());
  if (reports.empty()) return s;
  std::vector<double> losses;
  for (const auto& r : reports) {
    losses.push_back(r.final_path.empty() ? std::numeric_limits<double>::infinity() : r.final_loss);
    s.converged += r.converged ? 1 : 0;
  }
  std::sort(losses.begin(), losses.end());
  const std::size_t n = losses.size();
  s.median = n % 2 ? losses[n / 2] : 0.5 * (losses[n / 2 - 1] + losses[n / 2]);
  s.min = losses.front();
  s.max = losses.back();
  double sum = 0.0;
  for (double l : losses) sum += l;
  s.mean = sum / static_cast<double>(n);
  return s;
}

}  // namespace cptrrt
