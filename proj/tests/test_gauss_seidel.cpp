#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "gnepp/gauss_seidel.hpp"

using namespace gnepp;

namespace {

Eigen::VectorXd pt2(double a, double b) {
  Eigen::VectorXd p(2);
  p << a, b;
  return p;
}

GsConfig run_cfg(const BuiltinEntry& e) {
  GsConfig cfg;
  cfg.tau0 = e.tau0;
  cfg.rule = e.adaptive_tau ? TauRule::Adaptive : TauRule::Fixed;
  return cfg;
}

}  // namespace

TEST_CASE("tau update identities") {
  BlockLayout L({1, 1});
  auto step = [&](double s) {
    // one block moves by s, the other stays
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>(pt2(s, 0), pt2(0, 0));
  };

  auto [a1, b1] = step(0.5);
  CHECK(update_tau(0.1, a1, b1, L, TauRule::Adaptive) == doctest::Approx(0.1));
  auto [a2, b2] = step(0.001);
  CHECK(update_tau(0.1, a2, b2, L, TauRule::Adaptive) == doctest::Approx(0.01));
  auto [a3, b3] = step(0.05);
  CHECK(update_tau(0.1, a3, b3, L, TauRule::Adaptive) == doctest::Approx(0.05));

  CHECK(update_tau(0.1, a2, b2, L, TauRule::Fixed) == doctest::Approx(0.1));
  CHECK(update_tau(0.1, a2, b2, L, TauRule::Zero) == doctest::Approx(0.0));

  // monotone nonincreasing under both rules
  for (double s : {1.0, 0.3, 0.01, 1e-6}) {
    auto [xa, xb] = step(s);
    CHECK(update_tau(0.1, xa, xb, L, TauRule::Adaptive) <= 0.1 + 1e-15);
    CHECK(update_tau(0.1, xa, xb, L, TauRule::Fixed) <= 0.1 + 1e-15);
  }
}

TEST_CASE("cycle detection") {
  // the alternating square pattern, period 4
  std::vector<Eigen::VectorXd> square;
  for (int k = 0; k < 13; ++k) {
    switch (k % 4) {
      case 0: square.push_back(pt2(1, 1)); break;
      case 1: square.push_back(pt2(1, -1)); break;
      case 2: square.push_back(pt2(-1, -1)); break;
      default: square.push_back(pt2(-1, 1)); break;
    }
  }
  auto p = detect_cycle(square);
  REQUIRE(p.has_value());
  CHECK(*p == 4);

  // constant sequences are period 1, handled upstream as convergence
  std::vector<Eigen::VectorXd> flat(8, pt2(0.5, 0.5));
  auto pc = detect_cycle(flat);
  REQUIRE(pc.has_value());
  CHECK(*pc == 1);

  // a strictly contracting sequence has no cycle
  std::vector<Eigen::VectorXd> contracting;
  for (int k = 0; k < 40; ++k) contracting.push_back(pt2(std::pow(0.9, k), -std::pow(0.9, k)));
  CHECK(!detect_cycle(contracting).has_value());

  // too few iterates: no verdict
  std::vector<Eigen::VectorXd> tiny(3, pt2(1, 1));
  CHECK(!detect_cycle(tiny).has_value());
}

TEST_CASE("infeasible subproblem stops the sweep with context") {
  BuiltinEntry e = builtin("ex3.1");
  GsTrace tr = gs_solve(e.instance, e.start, run_cfg(e));
  REQUIRE(tr.status == GsStatus::SubproblemInfeasible);
  CHECK(tr.fail_iter == 1);
  CHECK(tr.fail_player == 2);
  // the first player moved to 2 before the failure
  CHECK(tr.x()[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("the cycling game is reported with period 4") {
  BuiltinEntry e = builtin("ex3.2-cycle");
  GsTrace tr = gs_solve(e.instance, e.start, run_cfg(e));
  REQUIRE(tr.status == GsStatus::CycleDetected);
  CHECK(tr.cycle_period == 4);
  REQUIRE(tr.cycle_states.size() == 4);
  Eigen::VectorXd want[4] = {pt2(1, 1), pt2(1, -1), pt2(-1, -1), pt2(-1, 1)};
  for (int k = 0; k < 4; ++k)
    CHECK((tr.cycle_states[k] - want[k]).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("convergence on the first known-GNE fixture") {
  BuiltinEntry e = builtin("ex5.2i");
  GsTrace tr = gs_solve(e.instance, e.start, run_cfg(e));
  REQUIRE(tr.status == GsStatus::Converged);
  CHECK(tr.x()[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(tr.x()[1] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(tr.iterations() <= 20);

  // tau history is monotone nonincreasing
  for (size_t k = 1; k < tr.tau_history.size(); ++k)
    CHECK(tr.tau_history[k] <= tr.tau_history[k - 1] + 1e-15);

  // every accepted iterate is feasible to tolerance
  for (const auto& x : tr.iterates)
    CHECK(feasibility_residual(e.instance, x).feasible);
}

TEST_CASE("convergence to a non-equilibrium limit is caught by verification") {
  BuiltinEntry e = builtin("ex3.3-limit");
  GsTrace tr = gs_solve(e.instance, e.start, run_cfg(e));
  REQUIRE(tr.status == GsStatus::Converged);
  CHECK(tr.x()[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(tr.x()[1]) <= 1e-3);

  // the exact limit (1,0) is not a GNE: player 1 can improve to 0
  GneReport bad = verify_gne(e.instance, pt2(1, 0));
  CHECK(!bad.is_gne);
  CHECK(bad.eps[0] == doctest::Approx(1.0).epsilon(1e-6));

  // (0,0) is a GNE of the same game
  GneReport good = verify_gne(e.instance, pt2(0, 0));
  CHECK(good.is_gne);
  CHECK(good.eps_max <= 1e-6);
}

TEST_CASE("verification gaps never go significantly negative") {
  BuiltinEntry e = builtin("ex5.4");
  Eigen::VectorXd x(4);
  x << 0.1, 0.4, 0.1, 0.4;
  GneReport rep = verify_gne(e.instance, x);
  CHECK(rep.is_gne);
  CHECK(rep.eps_max <= 1e-6);
  for (double eps : rep.eps) CHECK(eps >= -1e-6);
}

TEST_CASE("zero tau rule reproduces the three-player cycle") {
  BuiltinEntry e = builtin("ex5.6");
  GsConfig cfg = run_cfg(e);
  cfg.rule = TauRule::Zero;
  GsTrace tr = gs_solve(e.instance, e.start, cfg);
  REQUIRE(tr.status == GsStatus::CycleDetected);
  CHECK(tr.cycle_period == 6);
}

TEST_CASE("fixed tau converges to consensus on the three-player game") {
  BuiltinEntry e = builtin("ex5.6");
  GsConfig cfg = run_cfg(e);
  cfg.rule = TauRule::Fixed;
  cfg.tau0 = 0.1;
  GsTrace tr = gs_solve(e.instance, e.start, cfg);
  REQUIRE(tr.status == GsStatus::Converged);
  CHECK(std::abs(tr.x()[0] - tr.x()[1]) <= 1e-3);
  CHECK(std::abs(tr.x()[1] - tr.x()[2]) <= 1e-3);
  GneReport rep = verify_gne(e.instance, tr.x());
  CHECK(rep.eps_max <= 1e-6);
}
