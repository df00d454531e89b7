#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "gnepp/moment.hpp"
#include "gnepp/sdp.hpp"

using namespace gnepp;

namespace {

// min x over a single 1x1 block with x = 1
SdpProblem one_by_one() {
  SdpProblem p;
  p.block_dims = {1};
  p.C = {Eigen::MatrixXd::Ones(1, 1)};
  SdpProblem::Row row;
  row.entries.push_back({0, 0, 0, 1.0});
  p.rows = {row};
  p.b = Eigen::VectorXd::Ones(1);
  return p;
}

// min trace(X) over 2x2 X >= 0 with X_12 = 1
SdpProblem trace_min() {
  SdpProblem p;
  p.block_dims = {2};
  p.C = {Eigen::MatrixXd::Identity(2, 2)};
  SdpProblem::Row row;
  row.entries.push_back({0, 0, 1, 1.0});  // off-diagonal: contributes 2 X_01
  p.rows = {row};
  p.b = Eigen::VectorXd::Constant(1, 2.0);
  return p;
}

void check_kkt(const SdpProblem& p, const SdpSolution& sol, double tol) {
  CHECK(sol.primal_res <= tol);
  CHECK(sol.dual_res <= tol);
  CHECK(sol.gap <= tol);
  for (size_t j = 0; j < sol.X.size(); ++j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(sol.X[j], Eigen::EigenvaluesOnly);
    CHECK(ex.eigenvalues().minCoeff() >= -tol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.S[j], Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -tol);
  }
}

}  // namespace

TEST_CASE("1x1 equality-pinned block") {
  SdpSolution sol = sdp_solve(one_by_one());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.pobj == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  check_kkt(one_by_one(), sol, 1e-8);
}

TEST_CASE("min trace with pinned off-diagonal") {
  SdpSolution sol = sdp_solve(trace_min());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.pobj == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.X[0](1, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.X[0](0, 1) == doctest::Approx(1.0).epsilon(1e-5));
  check_kkt(trace_min(), sol, 1e-8);
}

TEST_CASE("weak duality at the returned iterate") {
  for (const SdpProblem& p : {one_by_one(), trace_min()}) {
    SdpSolution sol = sdp_solve(p);
    CHECK(sol.pobj >= sol.dobj - 1e-8);
  }
}

TEST_CASE("moment relaxation of min x over x >= 1 solves to 1") {
  auto L = std::make_shared<BlockLayout>(std::vector<int>{1});
  auto x = Polynomial::variable(L, 1, 1);
  std::vector<Constraint> cons = {{x - Polynomial::constant(L, 1.0), Relation::Geq}};
  MomentRelaxation rel = build_moment_relaxation(x, cons, 1, 1);
  SdpSolution sol = sdp_solve(rel.sdp);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.pobj == doctest::Approx(1.0).epsilon(1e-6));
  check_kkt(rel.sdp, sol, 1e-7);
}

TEST_CASE("primal infeasibility is detected") {
  // a PSD diagonal entry pinned to -1 has no feasible point
  SdpProblem p;
  p.block_dims = {1};
  p.C = {Eigen::MatrixXd::Ones(1, 1)};
  SdpProblem::Row row;
  row.entries.push_back({0, 0, 0, 1.0});
  p.rows = {row};
  p.b = Eigen::VectorXd::Constant(1, -1.0);
  SdpSolution sol = sdp_solve(p);
  CHECK(sol.status == SdpStatus::PrimalInfeasible);

  // x >= 1 and -x >= 0 simultaneously: the order-2 relaxation certifies it
  auto L = std::make_shared<BlockLayout>(std::vector<int>{1});
  auto x = Polynomial::variable(L, 1, 1);
  std::vector<Constraint> cons = {{x - Polynomial::constant(L, 1.0), Relation::Geq},
                                  {-x, Relation::Geq}};
  MomentRelaxation rel = build_moment_relaxation(x, cons, 1, 2);
  SdpSolution msol = sdp_solve(rel.sdp);
  CHECK(msol.status == SdpStatus::PrimalInfeasible);
}

TEST_CASE("determinism: identical problems give identical iterates") {
  auto run = [] {
    SdpSolution sol = sdp_solve(trace_min());
    std::ostringstream os;
    os.precision(17);
    os << sol.iters << " " << sol.pobj << " " << sol.dobj << " " << sol.X[0] << " " << sol.y;
    return os.str();
  };
  CHECK(run() == run());
}

TEST_CASE("free variables: certificate-style row") {
  // min x11 over X >= 0 (1x1), free u, with X + u = 1, u = 0.25
  SdpProblem p;
  p.block_dims = {1};
  p.C = {Eigen::MatrixXd::Ones(1, 1)};
  p.num_free = 1;
  p.c_free = Eigen::VectorXd::Zero(1);
  SdpProblem::Row r1, r2;
  r1.entries.push_back({0, 0, 0, 1.0});
  r1.free_entries.push_back({0, 1.0});
  r2.free_entries.push_back({0, 1.0});
  p.rows = {r1, r2};
  p.b = Eigen::VectorXd(2);
  p.b << 1.0, 0.25;
  SdpSolution sol = sdp_solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.free_vals[0] == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(sol.X[0](0, 0) == doctest::Approx(0.75).epsilon(1e-6));
}
