#include "cptrrt/experiments.hpp"

#include "cptrrt/path_metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace cptrrt {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void ExperimentSpec::validate() const {
  if (model == ModelKind::cpt) theta.validate();
  if (model == ModelKind::cvar && !(q >= 0.0 && q < 1.0))
    throw std::invalid_argument("--q must lie in [0, 1)");
  if (iterations < 1) throw std::invalid_argument("--iters must be >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("--delta must be >= 0");
  if (!(steer > 0.0)) throw std::invalid_argument("--steer must be > 0");
  if (!(gamma_rrt > 0.0)) throw std::invalid_argument("--gamma-rrt must be > 0");
  if (resolution < 2) throw std::invalid_argument("--resolution must be >= 2");
  if (bins < 1) throw std::invalid_argument("--bins must be >= 1");
  if (deltas.empty()) throw std::invalid_argument("--deltas must not be empty");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("--deltas entries must be >= 0");
  if (checkpoint_every < 1) throw std::invalid_argument("--checkpoint must be >= 1");
  if (runs < 1) throw std::invalid_argument("--runs must be >= 1");
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("--kappa must be > 0");
  if (max_iters < 1) throw std::invalid_argument("--max-iters must be >= 1");
}

RiskModel ExperimentSpec::risk_model() const {
  switch (model) {
    case ModelKind::expected: return ExpectedModel{};
    case ModelKind::cpt: return CptModel{theta};
    case ModelKind::cvar: return CvarModel{q};
  }
  throw std::logic_error("unreachable model kind");
}

PreparedRun prepare(const ExperimentSpec& spec) {
  spec.validate();
  PreparedRun run{load_scenario(spec.scenario), {}};
  const auto start = spec.start ? spec.start : run.scenario.start;
  const auto goal = spec.goal ? spec.goal : run.scenario.goal;
  if (!start || !goal) throw std::invalid_argument("start and goal must come from the scenario or --start/--goal");
  run.planner.start = *start;
  run.planner.goal = *goal;
  run.planner.iterations = spec.iterations;
  run.planner.delta = spec.delta;
  run.planner.steer_distance = spec.steer;
  run.planner.gamma_rrt = spec.gamma_rrt;
  run.planner.seed = spec.seed;
  run.planner.validate(run.scenario.field.space);
  return run;
}

namespace {

ordered_json point_json(const Point& p) { return ordered_json::array({p.x(), p.y()}); }

ordered_json config_json(const ExperimentSpec& spec, const PlannerConfig& cfg, const RiskModel& model) {
  ordered_json j;
  j["scenario"] = spec.scenario.string();
  j["model"] = model_tag(model);
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["delta"] = cfg.delta;
  j["steer"] = cfg.steer_distance;
  j["gamma_rrt"] = cfg.gamma_rrt;
  j["resolution"] = spec.resolution;
  j["bins"] = spec.bins;
  j["start"] = point_json(cfg.start);
  j["goal"] = point_json(cfg.goal);
  return j;
}

void write_text(std::vector<fs::path>& written, const fs::path& file,
                const std::function<void(std::ostream&)>& writer, bool binary = false) {
  write_file_atomic(file, writer, binary);
  written.push_back(file);
}

}  // namespace

std::vector<fs::path> run_build_field(const ExperimentSpec& spec) {
  const PreparedRun run = prepare(spec);
  const RiskField risk = build_risk_field(run.scenario.field, spec.risk_model(), spec.bins,
                                          spec.resolution, spec.threads);
  std::vector<fs::path> written;
  write_text(written, spec.out_dir / "risk_field.csv", [&](std::ostream& os) { write_risk_csv(risk, os); });
  if (spec.pgm)
    write_text(written, spec.out_dir / "risk_field.pgm", [&](std::ostream& os) { write_risk_pgm(risk, os); }, true);
  return written;
}

std::vector<fs::path> run_plan(const ExperimentSpec& spec) {
  const PreparedRun run = prepare(spec);
  const RiskModel model = spec.risk_model();
  const RiskField risk = build_risk_field(run.scenario.field, model, spec.bins, spec.resolution, spec.threads);
  const PlanResult res = plan(run.scenario.field.space, risk, run.planner);
  const Path exported = with_goal_snap(res.path, run.planner.goal);
  const bool snapped = exported.size() != res.path.size();

  ordered_json manifest;
  manifest["command"] = "plan";
  manifest["config"] = config_json(spec, run.planner, model);
  manifest["nodes"] = res.tree.size();
  manifest["path_waypoints"] = res.path.size();
  manifest["path_cost"] = path_cost(res.path, risk, run.planner.delta);
  manifest["path_length"] = arc_length(res.path);
  manifest["goal_snap"] = snapped;
  manifest["snapped_path_cost"] = path_cost(exported, risk, run.planner.delta);
  manifest["snapped_path_length"] = arc_length(exported);

  std::vector<fs::path> written;
  write_text(written, spec.out_dir / "tree.csv", [&](std::ostream& os) { write_tree_csv(res.tree, os); });
  write_text(written, spec.out_dir / "path.csv", [&](std::ostream& os) { write_path_csv(exported, os, snapped); });
  write_text(written, spec.out_dir / "manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  return written;
}

std::vector<fs::path> run_delta_sweep(const ExperimentSpec& spec) {
  const PreparedRun run = prepare(spec);
  const RiskModel model = spec.risk_model();
  const RiskField risk = build_risk_field(run.scenario.field, model, spec.bins, spec.resolution, spec.threads);

  struct Row {
    double delta;
    Path path;
    bool snapped;
    double length;
    double cost;
    std::size_t nodes;
  };
  std::vector<Row> rows;
  for (double d : spec.deltas) {
    PlannerConfig cfg = run.planner;
    cfg.delta = d;
    const PlanResult res = plan(run.scenario.field.space, risk, cfg);
    Path exported = with_goal_snap(res.path, cfg.goal);
    const bool snapped = exported.size() != res.path.size();
    rows.push_back({d, exported, snapped, arc_length(exported), path_cost(res.path, risk, d), res.tree.size()});
  }

  std::vector<fs::path> written;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_text(written, spec.out_dir / ("path_delta_" + std::to_string(i) + ".csv"),
               [&](std::ostream& os) { write_path_csv(rows[i].path, os, rows[i].snapped); });
  }
  write_text(written, spec.out_dir / "delta_sweep.csv", [&](std::ostream& os) {
    os << "# model=" << model_tag(model) << " seed=" << spec.seed << " iterations=" << spec.iterations << '\n';
    os << "index,delta,path_length,path_cost,nodes\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      os << i << ',' << format_double(rows[i].delta) << ',' << format_double(rows[i].length) << ','
         << format_double(rows[i].cost) << ',' << rows[i].nodes << '\n';
  });
  return written;
}

std::vector<CheckpointSample> convergence_series(const RiskField& risk, const PlannerConfig& cfg, int every) {
  if (every < 1) throw std::invalid_argument("convergence: checkpoint interval must be >= 1");
  std::vector<CheckpointSample> samples;
  PlanHooks hooks;
  hooks.checkpoint_every = static_cast<std::size_t>(every);
  hooks.on_checkpoint = [&](int it, const Tree& tree) {
    CheckpointSample s;
    s.iteration = it;
    const Path raw = extract_path(tree, cfg.goal);
    s.path_cost = path_cost(raw, risk, cfg.delta);
    s.goal_cost = best_goal_cost(tree, cfg.goal, risk, cfg.delta, cfg.steer_distance);
    s.path = with_goal_snap(raw, cfg.goal);
    if (!samples.empty()) s.area_to_previous = area_between(samples.back().path, s.path);
    samples.push_back(std::move(s));
  };
  plan(risk.space(), risk, cfg, hooks);
  return samples;
}

std::vector<fs::path> run_convergence(const ExperimentSpec& spec) {
  const PreparedRun run = prepare(spec);
  const RiskModel model = spec.risk_model();
  const RiskField risk = build_risk_field(run.scenario.field, model, spec.bins, spec.resolution, spec.threads);

  std::vector<std::vector<CheckpointSample>> series;
  for (int r = 0; r < spec.runs; ++r) {
    PlannerConfig cfg = run.planner;
    // Run 0 keeps the spec seed so it matches `plan`.
    cfg.seed = r == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(r));
    series.push_back(convergence_series(risk, cfg, spec.checkpoint_every));
  }

  std::vector<fs::path> written;
  write_text(written, spec.out_dir / "convergence.csv", [&](std::ostream& os) {
    os << "# model=" << model_tag(model) << " seed=" << spec.seed << " checkpoint=" << spec.checkpoint_every << '\n';
    os << "run,iteration,path_cost,goal_cost,area_to_previous\n";
    for (std::size_t r = 0; r < series.size(); ++r) {
      for (const auto& s : series[r]) {
        os << r << ',' << s.iteration << ',' << format_double(s.path_cost) << ',' << format_double(s.goal_cost) << ',';
        if (s.area_to_previous >= 0.0) os << format_double(s.area_to_previous);
        os << '\n';
      }
    }
  });
  return written;
}

std::vector<fs::path> run_fit(const ExperimentSpec& spec) {
  const PreparedRun run = prepare(spec);
  if (spec.model == ModelKind::expected) throw std::invalid_argument("fit: the expected model has no parameters");
  if (spec.target.empty()) throw std::invalid_argument("fit: --target is required");
  const Path target = load_path_csv(spec.target);
  if (target.size() < 2) throw std::invalid_argument("fit: target path needs at least two waypoints");
  if ((target.front() - run.planner.start).norm() > kDefaultEndpointTol ||
      (target.back() - run.planner.goal).norm() > kDefaultEndpointTol)
    throw std::invalid_argument("fit: target path endpoints do not match start/goal");

  SpsaConfig cfg;
  cfg.kappa = spec.kappa;
  cfg.max_iters = spec.max_iters;
  cfg.planner = run.planner;
  cfg.seed = spec.seed;
  cfg.seeding = spec.seeding;
  RiskBuilder builder;
  const CostField& field = run.scenario.field;
  if (spec.model == ModelKind::cpt) {
    cfg.theta0 = spec.theta.to_vector();
    cfg.bounds = ParamBox::cpt_default();
    builder = [&field, &spec](const VectorXd& th) {
      return build_risk_field(field, CptModel{CptParams::from_vector(th)}, spec.bins, spec.resolution);
    };
  } else {
    cfg.theta0 = VectorXd::Constant(1, spec.q);
    cfg.bounds = ParamBox::cvar_default();
    builder = [&field, &spec](const VectorXd& th) {
      return build_risk_field(field, CvarModel{th[0]}, spec.bins, spec.resolution);
    };
  }
  cfg.validate();

  const std::vector<FitReport> reports = fit_trials(target, cfg, builder, spec.trials, spec.threads);
  const FitSummary summary = summarize(reports);

  std::vector<fs::path> written;
  for (std::size_t t = 0; t < reports.size(); ++t) {
    write_text(written, spec.out_dir / ("report_" + std::to_string(t) + ".csv"),
               [&](std::ostream& os) { write_fit_report_csv(reports[t], os); });
    if (!reports[t].final_path.empty())
      write_text(written, spec.out_dir / "paths" / ("path_" + std::to_string(t) + ".csv"),
                 [&](std::ostream& os) { write_path_csv(reports[t].final_path, os, true); });
  }
  write_text(written, spec.out_dir / "summary.csv", [&](std::ostream& os) {
    os << "# model=" << (spec.model == ModelKind::cpt ? "cpt" : "cvar") << " seed=" << spec.seed
       << " kappa=" << format_double(spec.kappa) << '\n';
    os << "statistic,value\n";
    os << "trials," << summary.trials << '\n';
    os << "converged," << summary.converged << '\n';
    os << "median," << format_double(summary.median) << '\n';
    os << "mean," << format_double(summary.mean) << '\n';
    os << "min," << format_double(summary.min) << '\n';
    os << "max," << format_double(summary.max) << '\n';
    for (std::size_t t = 0; t < reports.size(); ++t) {
      os << "trial_" << t << "_final_loss," << format_double(reports[t].final_loss) << '\n';
      if (reports[t].aborted) os << "# trial " << t << " aborted: " << reports[t].error << '\n';
    }
  });
  return written;
}

}  // namespace cptrrt
