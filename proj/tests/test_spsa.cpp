#include "cptrrt/path_metrics.hpp"
#include "cptrrt/spsa.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cptrrt;

namespace {

struct Fixture {
  cptrrt::Scenario sc = load_scenario(testsupport::fire_room());

  RiskBuilder cpt() const {
    return [this](const VectorXd& th) {
      return build_risk_field(sc.field, CptModel{CptParams::from_vector(th)}, 10, 41);
    };
  }
  RiskBuilder cvar() const {
    return [this](const VectorXd& th) { return build_risk_field(sc.field, CvarModel{th[0]}, 10, 41); };
  }

  SpsaConfig config(std::uint64_t seed) const {
    SpsaConfig cfg;
    cfg.theta0 = (VectorXd(4) << 0.74, 1.0, 0.88, 2.25).finished();
    cfg.bounds = ParamBox::cpt_default();
    cfg.kappa = 15;
    cfg.max_iters = 4;
    cfg.planner.start = *sc.start;
    cfg.planner.goal = *sc.goal;
    cfg.planner.iterations = 1500;
    cfg.planner.delta = 0.01;
    cfg.planner.seed = 7;
    cfg.seed = seed;
    return cfg;
  }

  // Planned under a different profile so the fit has work to do.
  Path far_target() const {
    const CptParams p = CptParams::from_vector((VectorXd(4) << 0.74, 0.05, 0.88, 2.25).finished());
    PlannerConfig pc = config(0).planner;
    pc.seed = 123;
    return with_goal_snap(plan(sc.field.space, build_risk_field(sc.field, CptModel{p}, 10, 41), pc).path, pc.goal);
  }
};

bool same_records(const FitReport& a, const FitReport& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.k != y.k || x.theta != y.theta || x.loss != y.loss || x.loss_plus != y.loss_plus ||
        x.loss_minus != y.loss_minus || x.a_k != y.a_k || x.c_k != y.c_k)
      return false;
  }
  return a.final_theta == b.final_theta && a.final_path.waypoints == b.final_path.waypoints;
}

}  // namespace

TEST_CASE("gains match long double evaluation and decay") {
  SpsaGains prev = spsa_gains(1);
  for (int k = 1; k <= 1000; ++k) {
    const SpsaGains g = spsa_gains(k);
    const long double base = 1.6L + k;
    REQUIRE(std::abs(g.a - static_cast<double>(0.4L / std::pow(base, 0.601L))) <= 1e-12);
    REQUIRE(std::abs(g.c - static_cast<double>(0.97L / std::pow(base, 0.301L))) <= 1e-12);
    REQUIRE(g.a > 0.0);
    REQUIRE(g.c > 0.0);
    if (k > 1) {
      REQUIRE(g.a < prev.a);
      REQUIRE(g.c < prev.c);
    }
    prev = g;
  }
  CHECK(spsa_gains(1).a == doctest::Approx(0.22523).epsilon(1e-4));
  CHECK(spsa_gains(1).c == doctest::Approx(0.727553).epsilon(1e-5));
  CHECK_THROWS_AS(spsa_gains(0), std::invalid_argument);
}

TEST_CASE("perturb examples") {
  const ParamBox box = ParamBox::cpt_default();
  const VectorXd theta = (VectorXd(4) << 0.74, 1.0, 0.5, 2.25).finished();
  Engine eng(1);
  Perturbation p = perturb(theta, 0.0, box, eng);
  CHECK(p.plus == theta);
  CHECK(p.minus == theta);

  std::set<std::vector<int>> signs;
  for (int i = 0; i < 200; ++i) {
    p = perturb(theta, 0.05, box, eng);
    std::vector<int> s;
    for (int j = 0; j < 4; ++j) {
      REQUIRE(std::abs(p.delta[j]) == 1.0);
      REQUIRE(p.plus[j] - theta[j] == doctest::Approx(0.05 * p.delta[j]).epsilon(1e-12));
      REQUIRE(theta[j] - p.minus[j] == doctest::Approx(0.05 * p.delta[j]).epsilon(1e-12));
      s.push_back(static_cast<int>(p.delta[j]));
    }
    signs.insert(s);
  }
  CHECK(signs.size() == 16);

  const VectorXd at_top = (VectorXd(4) << 2.0, 5.0, 0.99, 15.0).finished();
  for (int i = 0; i < 50; ++i) {
    p = perturb(at_top, 0.3, box, eng);
    for (int j = 0; j < 4; ++j)
      if (p.delta[j] > 0) REQUIRE(p.plus[j] == box.upper[j]);
    REQUIRE(box.contains(p.plus));
    REQUIRE(box.contains(p.minus));
  }
}

TEST_CASE("step examples") {
  const ParamBox box = ParamBox::cpt_default();
  const VectorXd theta = (VectorXd(4) << 0.74, 1.0, 0.88, 2.25).finished();
  const VectorXd delta = (VectorXd(4) << 1, -1, -1, 1).finished();
  CHECK(spsa_step(theta, 3, 4.0, 4.0, delta, box) == theta);

  ParamBox line;
  line.lower = VectorXd::Constant(1, -100);
  line.upper = VectorXd::Constant(1, 100);
  const SpsaGains g = spsa_gains(2);
  const VectorXd one = VectorXd::Constant(1, 1.0);
  const VectorXd next = spsa_step(VectorXd::Constant(1, 3.0), 2, 2 * g.c + 1.0, 1.0, one, line);
  CHECK(next[0] == doctest::Approx(3.0 - g.a).epsilon(1e-14));

  const VectorXd clamped = spsa_step(theta, 1, 1000.0, 0.0, delta, box);
  CHECK(clamped[0] == box.lower[0]);
  CHECK(clamped[1] == box.upper[1]);
  CHECK(box.contains(clamped));

  CHECK_THROWS_AS(spsa_step(theta, 1, NAN, 0.0, delta, box), std::invalid_argument);
}

TEST_CASE("config validation") {
  Fixture fx;
  SpsaConfig cfg = fx.config(1);
  CHECK_NOTHROW(cfg.validate());
  cfg.kappa = 0;
  CHECK_THROWS(cfg.validate());
  cfg = fx.config(1);
  cfg.max_iters = 0;
  CHECK_THROWS(cfg.validate());
  cfg = fx.config(1);
  cfg.theta0[2] = 1.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("a target planned under the start point converges immediately") {
  Fixture fx;
  const SpsaConfig cfg = fx.config(3);
  const RiskField r0 = fx.cpt()(cfg.theta0);
  const Path target = with_goal_snap(plan(r0.space(), r0, cfg.planner).path, cfg.planner.goal);
  const FitReport rep = fit(target, cfg, fx.cpt());
  CHECK(rep.converged);
  CHECK(rep.final_loss == 0.0);
  CHECK(rep.records.size() == 1);
  CHECK(rep.plans == 1);
  CHECK(rep.final_theta == cfg.theta0);
}

TEST_CASE("fit respects bounds, plan budget and reproducibility") {
  Fixture fx;
  const Path target = fx.far_target();
  for (PlannerSeeding mode : {PlannerSeeding::common, PlannerSeeding::per_evaluation}) {
    SpsaConfig cfg = fx.config(11);
    cfg.kappa = 1e-6;
    cfg.seeding = mode;
    const FitReport a = fit(target, cfg, fx.cpt());
    REQUIRE_FALSE(a.aborted);
    CHECK(a.records.size() == 5);
    CHECK(a.plans == 1 + 3 * cfg.max_iters);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].k == static_cast<int>(i));
      CHECK(cfg.bounds.contains(a.records[i].theta));
      CHECK(a.records[i].loss >= 0.0);
    }
    double best = a.records[0].loss;
    for (const auto& r : a.records) best = std::min(best, r.loss);
    CHECK(a.final_loss == best);
    CHECK(same_records(a, fit(target, cfg, fx.cpt())));
  }
}

TEST_CASE("evaluation seeds") {
  Fixture fx;
  SpsaConfig cfg = fx.config(5);
  cfg.seeding = PlannerSeeding::common;
  CHECK(evaluation_seed(cfg, 3, 1) == cfg.planner.seed);
  cfg.seeding = PlannerSeeding::per_evaluation;
  CHECK(evaluation_seed(cfg, 0, 2) == cfg.planner.seed);
  std::set<std::uint64_t> seen;
  for (int k = 1; k <= 10; ++k)
    for (int w = 0; w < 3; ++w) seen.insert(evaluation_seed(cfg, k, w));
  CHECK(seen.size() == 30);
}

TEST_CASE("cvar fit keeps q inside [0, 1)") {
  Fixture fx;
  SpsaConfig cfg = fx.config(2);
  cfg.theta0 = VectorXd::Constant(1, 0.9);
  cfg.bounds = ParamBox::cvar_default();
  cfg.kappa = 1e-6;
  const FitReport rep = fit(fx.far_target(), cfg, fx.cvar());
  REQUIRE_FALSE(rep.aborted);
  for (const auto& r : rep.records) {
    CHECK(r.theta[0] >= 0.0);
    CHECK(r.theta[0] < 1.0);
  }
}

TEST_CASE("trials are independent of the worker count") {
  Fixture fx;
  SpsaConfig cfg = fx.config(8);
  cfg.max_iters = 2;
  cfg.kappa = 1e-6;
  const Path target = fx.far_target();
  const auto serial = fit_trials(target, cfg, fx.cpt(), 4, 1);
  const auto parallel = fit_trials(target, cfg, fx.cpt(), 4, 3);
  REQUIRE(serial.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) CHECK(same_records(serial[t], parallel[t]));
  CHECK_FALSE(same_records(serial[0], serial[1]));

  const FitSummary s = summarize(serial);
  CHECK(s.trials == 4);
  CHECK(s.min <= s.median);
  CHECK(s.median <= s.max);
}

TEST_CASE("builder failures abort with a partial report") {
  Fixture fx;
  SpsaConfig cfg = fx.config(4);
  cfg.kappa = 1e-6;
  int calls = 0;
  const RiskBuilder flaky = [&](const VectorXd& th) {
    if (++calls == 3) throw std::runtime_error("field unavailable");
    return fx.cpt()(th);
  };
  const FitReport rep = fit(fx.far_target(), cfg, flaky);
  CHECK(rep.aborted);
  CHECK(rep.error == "field unavailable");
  CHECK(rep.records.size() == 1);
}
