// Command-line front end: risk fields, planning runs, sweeps and parameter fits.

#include "cptrrt/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw CLI::ValidationError(flag, "malformed number '" + item + "'");
    out.push_back(v);
  }
  if (expected && out.size() != expected)
    throw CLI::ValidationError(flag, "expected " + std::to_string(expected) + " comma-separated values");
  if (out.empty()) throw CLI::ValidationError(flag, "expected at least one value");
  return out;
}

struct RawFlags {
  std::string model = "cpt";
  std::string theta;
  std::string start;
  std::string goal;
  std::string deltas;
};

void add_common(CLI::App* sub, cptrrt::ExperimentSpec& spec, RawFlags& raw) {
  sub->add_option("--scenario", spec.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--model", raw.model, "Risk model: expected | cpt | cvar")
      ->check(CLI::IsMember({"expected", "cpt", "cvar"}));
  sub->add_option("--theta", raw.theta, "CPT parameters alpha,beta,gamma,lambda");
  sub->add_option("--q", spec.q, "CVaR level in [0,1)");
  sub->add_option("--iters", spec.iterations, "Planner iterations T");
  sub->add_option("--delta", spec.delta, "Urgency weight on path length");
  sub->add_option("--steer", spec.steer, "Steer distance d");
  sub->add_option("--gamma-rrt", spec.gamma_rrt, "RRT* neighbourhood constant");
  sub->add_option("--resolution", spec.resolution, "Risk grid samples per axis");
  sub->add_option("--bins", spec.bins, "Discretization bins M");
  sub->add_option("--seed", spec.seed, "Base random seed");
  sub->add_option("--out", spec.out_dir, "Output directory");
  sub->add_option("--start", raw.start, "Start point x,y (overrides the scenario)");
  sub->add_option("--goal", raw.goal, "Goal point x,y (overrides the scenario)");
  sub->add_option("--threads", spec.threads, "Worker threads for grids and fit trials");
}

void finish(cptrrt::ExperimentSpec& spec, const RawFlags& raw) {
  spec.model = raw.model == "expected" ? cptrrt::ModelKind::expected
               : raw.model == "cvar"   ? cptrrt::ModelKind::cvar
                                       : cptrrt::ModelKind::cpt;
  if (!raw.theta.empty()) {
    const auto v = parse_list(raw.theta, 4, "--theta");
    spec.theta = cptrrt::CptParams{v[0], v[1], v[2], v[3]};
  }
  if (!raw.start.empty()) {
    const auto v = parse_list(raw.start, 2, "--start");
    spec.start = cptrrt::Point(v[0], v[1]);
  }
  if (!raw.goal.empty()) {
    const auto v = parse_list(raw.goal, 2, "--goal");
    spec.goal = cptrrt::Point(v[0], v[1]);
  }
  if (!raw.deltas.empty()) spec.deltas = parse_list(raw.deltas, 0, "--deltas");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-perception-aware RRT* planning toolkit"};
  app.require_subcommand(1);

  cptrrt::ExperimentSpec spec;
  RawFlags raw;

  auto* build = app.add_subcommand("build-field", "Write the perceived-risk grid for a model");
  add_common(build, spec, raw);
  build->add_flag("--pgm", spec.pgm, "Also write a P5 raster preview");

  auto* plan = app.add_subcommand("plan", "Plan one path and export tree, path and manifest");
  add_common(plan, spec, raw);

  auto* sweep = app.add_subcommand("delta-sweep", "Plan once per urgency weight");
  add_common(sweep, spec, raw);
  sweep->add_option("--deltas", raw.deltas, "Comma-separated delta values");

  auto* conv = app.add_subcommand("convergence", "Checkpointed path cost and path-change series");
  add_common(conv, spec, raw);
  conv->add_option("--checkpoint", spec.checkpoint_every, "Iterations between checkpoints");
  conv->add_option("--runs", spec.runs, "Independent runs");

  auto* fit = app.add_subcommand("fit", "Fit model parameters to a target path with SPSA");
  add_common(fit, spec, raw);
  fit->add_option("--target", spec.target, "Target path CSV (x,y)")->required()->check(CLI::ExistingFile);
  fit->add_option("--trials", spec.trials, "Independent SPSA trials");
  fit->add_option("--kappa", spec.kappa, "Loss tolerance");
  fit->add_option("--max-iters", spec.max_iters, "SPSA iterations per trial");
  fit->add_option("--planner-seeding", spec.seeding, "Planner seeds per evaluation or common to a trial")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, cptrrt::PlannerSeeding>{{"per-evaluation", cptrrt::PlannerSeeding::per_evaluation},
                                                         {"common", cptrrt::PlannerSeeding::common}}));

  CLI11_PARSE(app, argc, argv);

  try {
    finish(spec, raw);
    std::vector<std::filesystem::path> written;
    if (*build) written = cptrrt::run_build_field(spec);
    else if (*plan) written = cptrrt::run_plan(spec);
    else if (*sweep) written = cptrrt::run_delta_sweep(spec);
    else if (*conv) written = cptrrt::run_convergence(spec);
    else if (*fit) written = cptrrt::run_fit(spec);
    for (const auto& f : written) std::cout << f.string() << '\n';
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
