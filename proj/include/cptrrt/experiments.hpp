#pragma once

#include "cptrrt/io.hpp"
#include "cptrrt/risk_field.hpp"
#include "cptrrt/spsa.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cptrrt {

enum class ModelKind { expected, cpt, cvar };

struct ExperimentSpec {
  std::filesystem::path scenario;
  std::filesystem::path out_dir = "out";

  ModelKind model = ModelKind::cpt;
  CptParams theta{};  // cpt parameters, or the fit's starting point
  double q = 0.5;     // cvar level, or the fit's starting point

  std::optional<Point> start;  // override the scenario's start/goal
  std::optional<Point> goal;

  int iterations = 20000;
  double delta = 1e-4;
  double steer = 0.35;
  double gamma_rrt = 100.0;
  int resolution = 201;
  int bins = 20;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  bool pgm = false;                               // build-field
  std::vector<double> deltas{1e-4, 1.0, 100.0};   // delta-sweep
  int checkpoint_every = 500;                     // convergence
  int runs = 1;                                   // convergence
  std::filesystem::path target;                   // fit
  int trials = 10;                                // fit
  double kappa = 15.0;                            // fit
  int max_iters = 10;                             // fit
  PlannerSeeding seeding = PlannerSeeding::per_evaluation;  // fit

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  RiskModel risk_model() const;
};

// Everything a command needs after loading and validating its inputs.
struct PreparedRun {
  Scenario scenario;
  PlannerConfig planner;
};

PreparedRun prepare(const ExperimentSpec& spec);

// Each command validates all inputs before writing anything and returns the
// files it wrote.
std::vector<std::filesystem::path> run_build_field(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_plan(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_delta_sweep(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_convergence(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_fit(const ExperimentSpec& spec);

struct CheckpointSample {
  int iteration = 0;
  double path_cost = 0.0;   // extracted path, as returned
  double goal_cost = 0.0;   // best_goal_cost within one steer distance
  double area_to_previous = -1.0;  // < 0 at the first checkpoint
  Path path;                // extracted path snapped to the goal
};

// One planner run with a sample every `every` iterations.
std::vector<CheckpointSample> convergence_series(const RiskField& risk, const PlannerConfig& cfg,
                                                 int every);

}  // namespace cptrrt
