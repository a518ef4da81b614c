#include "cptrrt/experiments.hpp"
#include "cptrrt/io.hpp"
#include "cptrrt/path_metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace cptrrt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + CPTRRT_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == 0 ? 0 : 1;
}

std::string scenario_arg() { return "--scenario \"" + testsupport::fire_room().string() + "\""; }

std::size_t count_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

std::string scenario_error(const std::string& text) {
  try {
    parse_scenario(text, "room.json");
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

// Reads the grid part of a risk CSV as plain numbers.
std::vector<std::vector<double>> csv_grid(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("bundled scenario loads") {
  const cptrrt::Scenario sc = load_scenario(testsupport::fire_room());
  CHECK(sc.field.space.describe() == "[-10,10]x[-10,10]");
  CHECK(sc.field.mean_terms.size() == 4);
  CHECK(sc.field.sigma_terms.size() == 1);
  REQUIRE(sc.start);
  REQUIRE(sc.goal);
  CHECK(*sc.start == Point(-5, 0));
  CHECK(sc.description.find("approximation") != std::string::npos);
}

TEST_CASE("malformed scenarios name the offending key") {
  CHECK(scenario_error("{\"space\": {\"lower\": [0, 0], \"upper\": [1, 1]}").find("line") != std::string::npos);
  CHECK(scenario_error("{}").find("space") != std::string::npos);
  CHECK(scenario_error("{\"space\": {\"lower\": [0, 0], \"upper\": [1]}}").find("space.upper") != std::string::npos);
  CHECK(scenario_error("{\"space\": {\"lower\": [0, 0], \"upper\": [-1, 1]}}").find("space") != std::string::npos);
  const std::string base = "{\"space\": {\"lower\": [-1, -1], \"upper\": [1, 1]}, ";
  CHECK(scenario_error(base + "\"bumps\": [{\"center\": [0, 0], \"inner\": [1, 1], \"outer\": [0.5, 2], \"rho_max\": 1}]}")
            .find("bumps[0]") != std::string::npos);
  CHECK(scenario_error(base + "\"gaussians_mu\": [{\"mean\": [0, 0], \"cov\": [[1, 3], [3, 1]], \"amplitude\": 1}]}")
            .find("gaussians_mu[0]") != std::string::npos);
  CHECK(scenario_error(base + "\"gaussians_sigma\": [{\"mean\": [0, 0], \"cov\": [1, 0, 0, 1]}]}")
            .find("amplitude") != std::string::npos);
  CHECK(scenario_error(base + "\"start\": [4, 0]}").find("start") != std::string::npos);
  CHECK_THROWS_AS(load_scenario("/nonexistent/room.json"), ScenarioError);
}

TEST_CASE("path csv round trips") {
  Path p{{Point(-5, 0), Point(0.1, 1.0 / 3.0), Point(4.999999999999, -2e-300), Point(5, 0)}};
  std::stringstream ss;
  write_path_csv(p, ss, true);
  const std::string text = ss.str();
  CHECK(text.find("x,y") != std::string::npos);
  const Path back = read_path_csv(ss);
  CHECK(back.waypoints == p.waypoints);
  std::stringstream again;
  write_path_csv(back, again, true);
  CHECK(again.str() == text);
}

TEST_CASE("tree csv round trips") {
  const cptrrt::Scenario sc = load_scenario(testsupport::fire_room());
  const RiskField risk = build_risk_field(sc.field, ExpectedModel{}, 20, 41);
  PlannerConfig cfg;
  cfg.start = *sc.start;
  cfg.goal = *sc.goal;
  cfg.iterations = 800;
  cfg.seed = 3;
  const Tree tree = plan(sc.field.space, risk, cfg).tree;
  std::stringstream ss;
  write_tree_csv(tree, ss);
  const std::string text = ss.str();
  CHECK(text.rfind("node_id,parent_id,x,y,j_cum", 0) == 0);
  const Tree back = read_tree_csv(ss);
  CHECK(back.same_as(tree));
  CHECK(back.children == tree.children);
  std::stringstream again;
  write_tree_csv(back, again);
  CHECK(again.str() == text);
}

TEST_CASE("fit report csv round trips") {
  FitReport rep;
  for (int k = 0; k < 3; ++k) {
    FitRecord r;
    r.k = k;
    r.theta = (VectorXd(4) << 0.74 + k * 0.1, 1.0 / 3.0, 0.88, 2.25).finished();
    r.a_k = k ? spsa_gains(k).a : 0.0;
    r.c_k = k ? spsa_gains(k).c : 0.0;
    r.loss = 100.0 / (k + 1);
    r.loss_plus = r.loss + 1;
    r.loss_minus = r.loss - 1;
    rep.records.push_back(r);
  }
  std::stringstream ss;
  write_fit_report_csv(rep, ss);
  const std::vector<FitRecord> back = read_fit_report_csv(ss);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].k == k);
    CHECK(back[k].theta == rep.records[k].theta);
    CHECK(back[k].a_k == rep.records[k].a_k);
    CHECK(back[k].c_k == rep.records[k].c_k);
    CHECK(back[k].loss == rep.records[k].loss);
  }
  CHECK(param_names(4) == std::vector<std::string>{"alpha", "beta", "gamma", "lambda"});
  CHECK(param_names(1) == std::vector<std::string>{"q"});
}

TEST_CASE("atomic writes leave nothing behind on failure") {
  const fs::path dir = testsupport::scratch_dir("atomic");
  const fs::path file = dir / "out.csv";
  CHECK_THROWS(write_file_atomic(file, [](std::ostream& os) {
    os << "partial";
    throw std::runtime_error("boom");
  }));
  CHECK(count_files(dir) == 0);
  write_file_atomic(file, [](std::ostream& os) { os << "whole\n"; });
  CHECK(slurp(file) == "whole\n");
  CHECK(count_files(dir) == 1);
}

TEST_CASE("cli build-field is deterministic and matches the mean on sigma-free scenarios") {
  const fs::path dir = testsupport::scratch_dir("cli_field");
  const std::string args = "build-field " + scenario_arg() + " --model cpt --theta 0.74,2,0.9,10 --resolution 51 --pgm";
  REQUIRE(run_cli(args + " --out \"" + (dir / "a").string() + "\"", dir / "a.log") == 0);
  REQUIRE(run_cli(args + " --out \"" + (dir / "b").string() + "\"", dir / "b.log") == 0);
  CHECK(slurp(dir / "a" / "risk_field.csv") == slurp(dir / "b" / "risk_field.csv"));
  CHECK(slurp(dir / "a" / "risk_field.pgm") == slurp(dir / "b" / "risk_field.pgm"));
  CHECK(slurp(dir / "a" / "risk_field.pgm").rfind("P5", 0) == 0);
  std::ifstream in(dir / "a" / "risk_field.csv");
  const RiskField back = read_risk_csv(in);
  CHECK(back.resolution() == 51);

  // Same room without the uncertainty blob.
  cptrrt::Scenario sc = load_scenario(testsupport::fire_room());
  std::string text = slurp(testsupport::fire_room());
  const auto pos = text.find("\"gaussians_sigma\"");
  REQUIRE(pos != std::string::npos);
  text = text.substr(0, text.rfind(',', pos)) + "\n}\n";
  const fs::path mu_only = dir / "mu_only.json";
  std::ofstream(mu_only) << text;
  REQUIRE(run_cli("build-field --scenario \"" + mu_only.string() + "\" --model expected --resolution 41 --out \"" +
                      (dir / "mu").string() + "\"",
                  dir / "mu.log") == 0);
  const auto grid = csv_grid(dir / "mu" / "risk_field.csv");
  REQUIRE(grid.size() == 41);
  for (int iy = 0; iy < 41; ++iy) {
    REQUIRE(grid[iy].size() == 41);
    for (int ix = 0; ix < 41; ++ix) {
      const Point x(-10 + 0.5 * ix, -10 + 0.5 * iy);
      REQUIRE(grid[iy][ix] == eval_moments(sc.field, x).mu);
    }
  }
}

TEST_CASE("risk-averse cpt field dominates the expected field") {
  const cptrrt::Scenario sc = load_scenario(testsupport::fire_room());
  CptParams p;
  p.alpha = 0.74;
  p.beta = 2;
  p.gamma = 0.9;
  p.lambda = 10;
  const RiskField cpt = build_risk_field(sc.field, CptModel{p}, 20, 201, 4);
  const RiskField er = build_risk_field(sc.field, ExpectedModel{}, 20, 201, 4);
  const auto ge = (cpt.grid().array() >= er.grid().array()).count();
  CHECK(static_cast<double>(ge) >= 0.99 * static_cast<double>(cpt.grid().size()));
}

TEST_CASE("cli plan smoke run and reruns") {
  const fs::path dir = testsupport::scratch_dir("cli_plan");
  const std::string args = "plan " + scenario_arg() + " --model expected --iters 1 --resolution 41 --seed 9";
  REQUIRE(run_cli(args + " --out \"" + (dir / "a").string() + "\"", dir / "a.log") == 0);
  std::ifstream in(dir / "a" / "tree.csv");
  CHECK(read_tree_csv(in).size() == 2);
  CHECK(fs::exists(dir / "a" / "manifest.json"));

  const std::string longer = "plan " + scenario_arg() + " --iters 3000 --resolution 81 --seed 9";
  REQUIRE(run_cli(longer + " --out \"" + (dir / "b").string() + "\"", dir / "b.log") == 0);
  REQUIRE(run_cli(longer + " --out \"" + (dir / "c").string() + "\"", dir / "c.log") == 0);
  for (const char* f : {"tree.csv", "path.csv", "manifest.json"})
    CHECK(slurp(dir / "b" / f) == slurp(dir / "c" / f));
  const Path p = load_path_csv(dir / "b" / "path.csv");
  CHECK(p.back() == Point(5, 0));
}

TEST_CASE("cli rejects invalid specs without writing") {
  const fs::path dir = testsupport::scratch_dir("cli_bad");
  const fs::path out = dir / "out";
  CHECK(run_cli("build-field " + scenario_arg() + " --model cvar --q 1.5 --out \"" + out.string() + "\"", dir / "1.log") != 0);
  CHECK(run_cli("plan " + scenario_arg() + " --theta 0.74,1,1.2,2.25 --out \"" + out.string() + "\"", dir / "2.log") != 0);
  CHECK(run_cli("plan " + scenario_arg() + " --goal 30,0 --out \"" + out.string() + "\"", dir / "3.log") != 0);
  CHECK(run_cli("plan " + scenario_arg() + " --iters 0 --out \"" + out.string() + "\"", dir / "4.log") != 0);

  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{\"space\": {\"lower\": [-10, -10], \"upper\": [10, 10]},\n \"bumps\": [{\"center\": [0, 0]}]}\n";
  CHECK(run_cli("build-field --scenario \"" + broken.string() + "\" --out \"" + out.string() + "\"", dir / "5.log") != 0);
  CHECK(slurp(dir / "5.log").find("bumps[0]") != std::string::npos);

  const fs::path far = dir / "far.csv";
  std::ofstream(far) << "x,y\n-5,0\n0,3\n8,0\n";
  CHECK(run_cli("fit " + scenario_arg() + " --target \"" + far.string() + "\" --out \"" + out.string() + "\"", dir / "6.log") != 0);
  CHECK(count_files(out) == 0);
}

TEST_CASE("cli fit writes one report per trial and a summary") {
  const fs::path dir = testsupport::scratch_dir("cli_fit");
  const std::string common = scenario_arg() + " --theta 0.74,1,0.88,2.25 --iters 1500 --resolution 61 --seed 4";
  REQUIRE(run_cli("plan " + common + " --out \"" + (dir / "target").string() + "\"", dir / "plan.log") == 0);
  REQUIRE(run_cli("fit " + common + " --trials 10 --target \"" + (dir / "target" / "path.csv").string() +
                      "\" --out \"" + (dir / "fit").string() + "\"",
                  dir / "fit.log") == 0);
  std::size_t reports = 0, summaries = 0;
  for (const auto& e : fs::directory_iterator(dir / "fit")) {
    const std::string name = e.path().filename().string();
    if (name.rfind("report_", 0) == 0) ++reports;
    if (name == "summary.csv") ++summaries;
  }
  CHECK(reports == 10);
  CHECK(summaries == 1);
  CHECK(slurp(dir / "fit" / "summary.csv").find("median,0\n") != std::string::npos);
  std::ifstream in(dir / "fit" / "report_3.csv");
  const auto recs = read_fit_report_csv(in);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].loss == 0.0);
}

TEST_CASE("cli convergence and delta sweep outputs") {
  const fs::path dir = testsupport::scratch_dir("cli_series");
  REQUIRE(run_cli("convergence " + scenario_arg() + " --iters 2000 --checkpoint 500 --runs 2 --resolution 61 --out \"" +
                      (dir / "conv").string() + "\"",
                  dir / "conv.log") == 0);
  const std::string conv = slurp(dir / "conv" / "convergence.csv");
  CHECK(conv.find("run,iteration,path_cost,goal_cost,area_to_previous") != std::string::npos);
  CHECK(conv.find("\n1,2000,") != std::string::npos);

  REQUIRE(run_cli("delta-sweep " + scenario_arg() + " --theta 0.74,2,0.9,10 --iters 20000 --out \"" +
                      (dir / "sweep").string() + "\"",
                  dir / "sweep.log") == 0);
  std::vector<double> lengths;
  for (int i = 0; i < 3; ++i) lengths.push_back(arc_length(load_path_csv(dir / "sweep" / ("path_delta_" + std::to_string(i) + ".csv"))));
  CHECK(lengths[1] <= lengths[0]);
  CHECK(lengths[2] <= lengths[1]);
  CHECK(slurp(dir / "sweep" / "delta_sweep.csv").find("index,delta,path_length,path_cost,nodes") != std::string::npos);
}
