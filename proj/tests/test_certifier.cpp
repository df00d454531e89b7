#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "gnepp/certifier.hpp"

using namespace gnepp;

TEST_CASE("delta_f and its defining identity") {
  GneppInstance inst = builtin("intro-1.4").instance;
  // player 1: f1 = x1, so delta_f = y1 - x1
  Polynomial d1 = delta_f(inst, 1);
  auto E = d1.layout();
  CHECK(d1.coefficient(Monomial::variable(VarRef{3, 1})) == doctest::Approx(1.0));
  CHECK(d1.coefficient(Monomial::variable(VarRef{1, 1})) == doctest::Approx(-1.0));
  CHECK(d1.terms().size() == 2);

  // player 2: evaluates as f2(x1, y2) - f2(x1, x2) at stitched points
  Polynomial d2 = delta_f(inst, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-2, 2);
  for (int t = 0; t < 30; ++t) {
    Eigen::VectorXd p(3);  // (x1, x2, y2)
    p << unif(rng), unif(rng), unif(rng);
    Eigen::VectorXd xy = p, xx = p;
    xy[1] = p[2];  // substitute y2 for x2
    double want = inst.players[1].objective.eval(xy.head(2)) -
                  inst.players[1].objective.eval(xx.head(2));
    CHECK(d2.eval(p) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("delta_f vanishes identically on the diagonal y_i = x_i") {
  for (const char* name : {"intro-1.4", "ex5.3", "ex5.4", "ex4.6"}) {
    GneppInstance inst = builtin(name).instance;
    for (int i = 1; i <= inst.num_players(); ++i) {
      Polynomial d = delta_f(inst, i);
      // rename the y copy back onto x_i: the coefficients must cancel
      Polynomial folded = d.rename_block(inst.num_players() + 1, i, d.layout());
      CHECK(folded.max_abs_coeff() <= 1e-12);
    }
  }
}

TEST_CASE("K_i tuple structure") {
  // ex4.6 player 1: h = (1, ball_x, x1, ball_y, y1, delta_f) — the paper's
  // five constraints plus the leading constant
  GneppInstance inst = builtin("ex4.6").instance;
  KiTuple ki = build_ki(inst, 1);
  REQUIRE(ki.h.size() == 6);
  CHECK(ki.h[0].degree() == 0);
  CHECK(ki.h[0].coefficient(Monomial{}) == doctest::Approx(1.0));
  CHECK((ki.h.back() - ki.delta_f).max_abs_coeff() <= 1e-14);

  // the y-copy entries evaluate like the x-copy with y substituted
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd p(3);  // (x1, x2, y1)
    p << unif(rng), unif(rng), unif(rng);
    Eigen::VectorXd swapped = p;
    std::swap(swapped[0], swapped[2]);
    for (size_t a = 1; a + 1 < ki.h.size(); ++a) {
      bool matched = false;
      for (size_t b = 1; b + 1 < ki.h.size(); ++b)
        if (std::abs(ki.h[a].eval(swapped) - ki.h[b].eval(p)) <= 1e-12) matched = true;
      CHECK(matched);  // x copy and y copy are images of each other
    }
  }

  // an unconstrained player contributes only (1, delta_f)
  GneppInstance free_inst;
  auto L = std::make_shared<BlockLayout>(std::vector<int>{1, 1});
  free_inst.layout = L;
  free_inst.name = "free";
  PlayerProblem p1, p2;
  p1.objective = Polynomial::variable(L, 1, 1);
  p2.objective = Polynomial::variable(L, 2, 1);
  free_inst.players = {p1, p2};
  KiTuple kf = build_ki(free_inst, 1);
  CHECK(kf.h.size() == 2);
}

TEST_CASE("equalities enter K_i as a +/- pair") {
  GneppInstance inst = builtin("ex3.2-cycle").instance;
  KiTuple ki = build_ki(inst, 2);  // player 2 carries x1^2 + x2^2 = 2
  // 1, +eq_x, -eq_x, +eq_y, -eq_y, delta_f
  CHECK(ki.h.size() == 6);
}

TEST_CASE("certify the disk game and re-check the certificate by hand") {
  CertifyResult r = certify(builtin("ex4.6").instance);
  REQUIRE(r.certified);
  CHECK(r.degree_used == 2);
  CHECK(r.cert.min_gram_eig >= -1e-6);
  for (double res : r.cert.identity_residual) CHECK(res <= 1e-6);
  CHECK(!r.cert.P.is_zero());
}

TEST_CASE("hand certificate: P = x1^3 - x1 x2 + x1") {
  GneppInstance inst = builtin("ex4.3").instance;
  auto L = inst.layout;
  auto X1 = Polynomial::variable(L, 1, 1), X2 = Polynomial::variable(L, 2, 1);
  Polynomial P = X1 * X1 * X1 - X1 * X2 + X1;

  KiTuple k1 = build_ki(inst, 1);
  auto E = k1.ext_layout;
  auto x1 = Polynomial::variable(E, 1, 1), x2 = Polynomial::variable(E, 2, 1),
       y1 = Polynomial::variable(E, 3, 1);
  Polynomial p10 = (y1 - x1) * (y1 - x1);
  Polynomial p11 = ((y1 * x1).scaled(3.0) - x2) * (y1 - x1);
  Polynomial zero(E);

  ManualCheckReport rep = check_manual(inst, P, {{p10, p11}, {zero, zero}});
  CHECK(rep.worst <= 1e-10);
  CHECK(rep.identity_ok);
  CHECK(rep.nonneg_ok);
}

TEST_CASE("hand certificate: P = (x11 + x12 + 1)^3 x2 via a^3 - b^3") {
  GneppInstance inst = builtin("ex4.5").instance;
  auto L = inst.layout;
  Polynomial s = Polynomial::variable(L, 1, 1) + Polynomial::variable(L, 1, 2) +
                 Polynomial::constant(L, 1.0);
  Polynomial P = s.pow(3) * Polynomial::variable(L, 2, 1);

  KiTuple k1 = build_ki(inst, 1);
  auto E1 = k1.ext_layout;
  auto a = Polynomial::variable(E1, 1, 1), b = Polynomial::variable(E1, 1, 2);
  auto ya = Polynomial::variable(E1, 3, 1), yb = Polynomial::variable(E1, 3, 2);
  Polynomial u = ya + yb + Polynomial::constant(E1, 1.0);
  Polynomial v = a + b + Polynomial::constant(E1, 1.0);
  Polynomial p10 = u * u + v * v + (ya + yb) * (a + b) + ya + yb + a + b;
  Polynomial p11(E1);

  KiTuple k2 = build_ki(inst, 2);
  auto E2 = k2.ext_layout;
  auto a2 = Polynomial::variable(E2, 1, 1), b2 = Polynomial::variable(E2, 1, 2),
       x2 = Polynomial::variable(E2, 2, 1), y2 = Polynomial::variable(E2, 3, 1);
  Polynomial p20 = a2.scaled(3.0) + b2.scaled(3.0) + Polynomial::constant(E2, 5.0);
  Polynomial p21 = (y2 - x2) * (a2.pow(3) + b2.pow(3) + (a2 * a2).scaled(3.0) +
                                (b2 * b2).scaled(3.0) + a2.scaled(3.0) + b2.scaled(3.0) +
                                Polynomial::constant(E2, 1.0));

  ManualCheckReport rep = check_manual(inst, P, {{p10, p11}, {p20, p21}});
  CHECK(rep.worst <= 1e-10);
  CHECK(rep.identity_ok);
}

TEST_CASE("P = 0 with zero multipliers leaves the full delta_f residual") {
  GneppInstance inst = builtin("intro-1.4").instance;
  std::vector<std::pair<Polynomial, Polynomial>> zeros;
  for (int i = 1; i <= 2; ++i) {
    auto E = build_ki(inst, i).ext_layout;
    zeros.push_back({Polynomial(E), Polynomial(E)});
  }
  ManualCheckReport rep = check_manual(inst, Polynomial(inst.layout), zeros);
  CHECK(!rep.identity_ok);
  // residual per player is the coefficient norm of delta_f_i
  for (int i = 1; i <= 2; ++i)
    CHECK(rep.residual[i - 1] == doctest::Approx(delta_f(inst, i).max_abs_coeff()));
}
