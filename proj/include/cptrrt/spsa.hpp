#pragma once

#include "cptrrt/planner.hpp"
#include "cptrrt/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cptrrt {

struct SpsaGains {
  double a;  // learning rate a_k
  double c;  // perturbation size c_k
};

// a_k = 0.4 / (1.6 + k)^0.601, c_k = 0.97 / (1.6 + k)^0.301 for k >= 1.
SpsaGains spsa_gains(int k);

struct ParamBox {
  VectorXd lower;
  VectorXd upper;

  void validate() const;
  bool contains(const Eigen::Ref<const VectorXd>& x) const;
  VectorXd clamp(const Eigen::Ref<const VectorXd>& x) const;

  // alpha [0.1, 2], beta [0.05, 5], gamma [0.1, 0.99], lambda [1.01, 15].
  static ParamBox cpt_default();
  // q in [0, 0.99].
  static ParamBox cvar_default();
};

struct Perturbation {
  VectorXd plus;
  VectorXd minus;
  VectorXd delta;  // entries +-1
};

Perturbation perturb(const Eigen::Ref<const VectorXd>& theta, double c_k, const ParamBox& bounds,
                     Engine& rng);

// theta - a_k * g with g_i = (loss_plus - loss_minus) / (2 c_k delta_i), then clamped.
VectorXd spsa_step(const Eigen::Ref<const VectorXd>& theta, int k, double loss_plus,
                   double loss_minus, const Eigen::Ref<const VectorXd>& delta,
                   const ParamBox& bounds);

// How planner seeds are assigned within a trial. `per_evaluation` derives a seed
// from (trial seed, k, which); the k = 0 evaluation uses planner.seed. `common`
// plans every evaluation with planner.seed.
enum class PlannerSeeding { per_evaluation, common };

struct SpsaConfig {
  VectorXd theta0;
  double kappa = 15.0;
  int max_iters = 10;
  PlannerConfig planner;
  ParamBox bounds;
  std::uint64_t seed = 0;  // drives the Bernoulli perturbations
  PlannerSeeding seeding = PlannerSeeding::per_evaluation;

  void validate() const;
};

struct FitRecord {
  int k = 0;
  VectorXd theta;
  double a_k = 0.0;
  double c_k = 0.0;
  double loss = 0.0;
  double loss_plus = 0.0;
  double loss_minus = 0.0;
};

struct FitReport {
  std::vector<FitRecord> records;
  VectorXd final_theta;
  double final_loss = 0.0;
  Path final_path;
  bool converged = false;
  bool aborted = false;
  std::string error;
  int plans = 0;
};

// Maps a parameter vector to the perceived-risk field the planner runs on.
using RiskBuilder = std::function<RiskField(const VectorXd& theta)>;

// Loss: area between the planner's path (snapped to the goal) and `target`.
FitReport fit(const Path& target, const SpsaConfig& cfg, const RiskBuilder& build_risk);

// Planner seed for evaluation `which` (0 = theta+, 1 = theta-, 2 = theta_k+1) of
// iteration k.
std::uint64_t evaluation_seed(const SpsaConfig& cfg, int k, int which);

// Independent trials; trial t uses Bernoulli seed derive_seed(cfg.seed, t).
std::vector<FitReport> fit_trials(const Path& target, const SpsaConfig& cfg,
                                  const RiskBuilder& build_risk, int trials, unsigned threads = 1);

struct FitSummary {
  double median = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int converged = 0;
  int trials = 0;
};

FitSummary summarize(const std::vector<FitReport>& reports);

}  // namespace cptrrt
