#include "gnepp/pop.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace gnepp {

std::string to_string(PopStatus s) {
  switch (s) {
    case PopStatus::Infeasible: return "Infeasible";
    case PopStatus::MinimizersExtracted: return "MinimizersExtracted";
    case PopStatus::BoundOnly: return "BoundOnly";
    case PopStatus::OrderCapReached: return "OrderCapReached";
  }
  return "?";
}

int numeric_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() == 0) return 0;
  Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues();
  double thresh = tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
  return static_cast<int>((ev.cwiseAbs().array() > thresh).count());
}

FlatResult flat_truncation(const Eigen::VectorXd& y, const MomentBasis& mb, int d1, int t,
                           double rank_tol) {
  FlatResult fr;
  fr.rank = numeric_rank(moment_matrix(mb, y, t), rank_tol);
  int r_low = numeric_rank(moment_matrix(mb, y, t - d1), rank_tol);
  fr.holds = (fr.rank == r_low && fr.rank > 0);
  return fr;
}

std::vector<Eigen::VectorXd> extract_minimizers(const Eigen::VectorXd& y, const MomentBasis& mb,
                                                int t, int d1, int rank, double rank_tol,
                                                unsigned seed) {
  const int n = mb.layout->dim(mb.block);
  Eigen::MatrixXd M = moment_matrix(mb, y, t);
  std::vector<Monomial> base = monomial_basis(*mb.layout, mb.block, t);
  const int nb = static_cast<int>(base.size());
  const int nlow = static_cast<int>(monomial_basis(*mb.layout, mb.block, t - d1).size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::MatrixXd V(nb, rank);  // factor with M ~= V V'
  for (int c = 0; c < rank; ++c) {
    int src = nb - 1 - c;  // eigenvalues ascending
    double lam = std::max(es.eigenvalues()[src], 0.0);
    V.col(c) = es.eigenvectors().col(src) * std::sqrt(lam);
  }

  // pick a well-conditioned monomial basis among rows of degree <= t - d1
  Eigen::MatrixXd Vlow = V.topRows(nlow);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Vlow.transpose());
  std::vector<int> basis_rows;
  for (int i = 0; i < rank && i < qr.colsPermutation().indices().size(); ++i)
    basis_rows.push_back(qr.colsPermutation().indices()[i]);
  if (static_cast<int>(basis_rows.size()) < rank) return {};
  std::sort(basis_rows.begin(), basis_rows.end());

  Eigen::MatrixXd Vb(rank, rank);
  for (int a = 0; a < rank; ++a) Vb.row(a) = V.row(basis_rows[a]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Vb.transpose());

  // multiplication matrices N_j: row a expresses x_j * b_a over the basis
  std::vector<Eigen::MatrixXd> N(n);
  std::map<Monomial, int, GradedLess> base_index;
  for (int i = 0; i < nb; ++i) base_index.emplace(base[i], i);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd Vsub(rank, rank);
    Monomial xj = Monomial::variable(VarRef{mb.block, j + 1});
    for (int a = 0; a < rank; ++a) {
      auto it = base_index.find(base[basis_rows[a]] * xj);
      if (it == base_index.end()) return {};
      Vsub.row(a) = V.row(it->second);
    }
    N[j] = lu.solve(Vsub.transpose()).transpose();
  }

  std::mt19937 rng(seed ? seed : 20240901u);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::MatrixXd Nmix = Eigen::MatrixXd::Zero(rank, rank);
  double wsum = 0;
  for (int j = 0; j < n; ++j) {
    double w = unif(rng);
    Nmix += w * N[j];
    wsum += w;
  }
  Nmix /= wsum;
  Eigen::RealSchur<Eigen::MatrixXd> schur(Nmix);
  const Eigen::MatrixXd& Q = schur.matrixU();

  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < rank; ++i) {
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) u[j] = Q.col(i).dot(N[j] * Q.col(i));
    bool dup = false;
    for (const auto& p : pts)
      if ((p - u).cwiseAbs().maxCoeff() < 1e-6) dup = true;
    if (!dup) pts.push_back(u);
  }
  std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return pts;
}

namespace {

// Newton refinement of a near-optimal point on its active manifold; the
// relaxation locates minimizers to roughly sdp accuracy, this sharpens them.
Eigen::VectorXd polish_point(const Polynomial& f, const std::vector<Constraint>& cons, int block,
                             const Eigen::VectorXd& u0, double act_tol) {
  LayoutPtr layout = f.layout() ? f.layout() : cons.at(0).poly.layout();
  const int off = layout->offset(block);
  const int n = layout->dim(block);
  auto lift = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(layout->total_dim());
    full.segment(off, n) = u;
    return full;
  };

  // active set from the starting point
  std::vector<const Polynomial*> act;
  {
    Eigen::VectorXd full = lift(u0);
    for (const auto& c : cons) {
      double scale = std::max(1.0, c.poly.max_abs_coeff());
      if (c.rel == Relation::Eq || std::abs(c.poly.eval(full)) <= act_tol * scale)
        act.push_back(&c.poly);
    }
  }
  const int m = static_cast<int>(act.size());

  std::vector<Polynomial> gf(n);
  std::vector<std::vector<Polynomial>> gg(m, std::vector<Polynomial>(n));
  for (int j = 0; j < n; ++j) {
    VarRef v{block, j + 1};
    gf[j] = f.derivative(v);
    for (int a = 0; a < m; ++a) gg[a][j] = act[a]->derivative(v);
  }

  Eigen::VectorXd u = u0;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  {
    // least-squares multipliers from grad f = sum lam grad g
    Eigen::VectorXd full = lift(u);
    Eigen::MatrixXd G(n, m);
    Eigen::VectorXd gfv(n);
    for (int j = 0; j < n; ++j) {
      gfv[j] = gf[j].eval(full);
      for (int a = 0; a < m; ++a) G(j, a) = gg[a][j].eval(full);
    }
    if (m) lam = G.colPivHouseholderQr().solve(gfv);
  }

  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd full = lift(u);
    Eigen::VectorXd F(n + m);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + m, n + m);
    for (int j = 0; j < n; ++j) {
      double s = gf[j].eval(full);
      for (int a = 0; a < m; ++a) s -= lam[a] * gg[a][j].eval(full);
      F[j] = s;
      for (int l = 0; l < n; ++l) {
        VarRef vl{block, l + 1};
        double h = gf[j].derivative(vl).eval(full);
        for (int a = 0; a < m; ++a) h -= lam[a] * gg[a][j].derivative(vl).eval(full);
        J(j, l) = h;
      }
      for (int a = 0; a < m; ++a) J(j, n + a) = -gg[a][j].eval(full);
    }
    for (int a = 0; a < m; ++a) {
      F[n + a] = act[a]->eval(full);
      for (int j = 0; j < n; ++j) J(n + a, j) = gg[a][j].eval(full);
    }
    if (F.cwiseAbs().maxCoeff() <= 1e-13) break;
    for (int i = 0; i < n + m; ++i) J(i, i) += 1e-12;
    Eigen::VectorXd d = J.partialPivLu().solve(F);
    if (!d.allFinite()) return u0;
    u -= d.head(n);
    lam -= d.tail(m);
    if ((u - u0).norm() > 0.01 * (1 + u0.norm())) return u0;  // wandered off
  }
  return u;
}

}  // namespace

PopResult pop_minimize(const Polynomial& f, const std::vector<Constraint>& cons, int block,
                       const PopOptions& opts) {
  const int d0 = relaxation_base_order(f, cons, block);
  const int d1 = truncation_gap(cons, block);
  const int dmax = (opts.d_max >= d0) ? opts.d_max : d0 + opts.order_cap_offset;

  PopResult res;
  LayoutPtr layout = f.layout() ? f.layout() : cons.at(0).poly.layout();
  const int off = layout->offset(block);
  const int n = layout->dim(block);

  auto feas_violation = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(layout->total_dim());
    full.segment(off, n) = u;
    double worst = 0;
    for (const auto& c : cons) {
      double v = c.poly.eval(full);
      double scale = std::max(1.0, c.poly.max_abs_coeff());
      double viol = (c.rel == Relation::Geq) ? std::max(0.0, -v) : std::abs(v);
      worst = std::max(worst, viol / scale);
    }
    return worst;
  };
  auto eval_f = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(layout->total_dim());
    full.segment(off, n) = u;
    return f.eval(full);
  };

  bool have_bound = false;
  for (int d = d0; d <= dmax; ++d) {
    MomentRelaxation rel = build_moment_relaxation(f, cons, block, d);
    SdpOptions so;
    so.tol = opts.sdp_tol;
    SdpSolution sol = sdp_solve(rel.sdp, so);
    res.sdp_status = sol.status;
    if (opts.verbose)
      std::fprintf(stderr, "pop d=%d sdp=%s pobj=%.9g rp=%.1e rd=%.1e gap=%.1e\n", d,
                   to_string(sol.status).c_str(), sol.pobj, sol.primal_res, sol.dual_res,
                   sol.gap);
    if (sol.status == SdpStatus::PrimalInfeasible) {
      res.status = PopStatus::Infeasible;
      res.order = d;
      return res;
    }
    if (sol.status == SdpStatus::DualInfeasible) {
      res.status = PopStatus::BoundOnly;
      res.order = d;
      res.bound = -std::numeric_limits<double>::infinity();
      return res;
    }
    // stalled-but-accurate solves still certify a bound; moderately stalled
    // ones are kept for extraction only, since extracted points are validated
    // independently against feasibility and optimality
    double worst_res = std::max({sol.primal_res, sol.dual_res, sol.gap});
    bool accurate = (sol.status == SdpStatus::Optimal) || worst_res <= 1e-6;
    if (!accurate && worst_res > 1e-3) continue;

    double theta = sol.pobj;
    if (accurate) {
      if (!have_bound || theta > res.bound) res.bound = theta;
      have_bound = true;
      res.order = d;
    }

    const Eigen::VectorXd& y = sol.free_vals;
    // stalled solves leave noise in the moment matrix; widen the rank
    // tolerance to the solve accuracy so the flat test can still fire
    double rank_tol =
        accurate ? opts.rank_tol : std::min(1e-3, std::max(opts.rank_tol, 100 * worst_res));
    for (int t = d1; t <= d; ++t) {
      FlatResult fr = flat_truncation(y, rel.basis, d1, t, rank_tol);
      if (!fr.holds) continue;
      auto pts = extract_minimizers(y, rel.basis, t, d1, fr.rank, rank_tol, opts.seed);
      // a dual residual certifies the bound only up to its product with the
      // solution magnitude, so large moments widen the acceptance gate
      double sol_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
      double opt_gate = std::max(opts.opt_tol, 10 * worst_res * sol_scale);
      std::vector<Eigen::VectorXd> valid;
      for (const auto& raw : pts) {
        // polish with a generous and a tight active-set guess; a constraint
        // that merely passes nearby must not be snapped onto, so among the
        // candidates the cleanly feasible one with the lowest objective wins
        // (a point living off feastol slack must not beat an exact one, or
        // the slack ratchets across Gauss-Seidel sweeps)
        Eigen::VectorXd u = raw;
        bool have = false;
        int bestc = 2;
        double bestf = 0;
        for (const Eigen::VectorXd& cand :
             {polish_point(f, cons, block, raw, 1e-4), polish_point(f, cons, block, raw, 1e-7),
              raw}) {
          double viol = feas_violation(cand);
          if (viol > opts.feastol) continue;
          int c = (viol <= 1e-13) ? 0 : 1;
          double fc = eval_f(cand);
          if (!have || c < bestc || (c == bestc && fc < bestf)) {
            u = cand;
            bestc = c;
            bestf = fc;
            have = true;
          }
        }
        if (feas_violation(u) <= opts.feastol &&
            std::abs(eval_f(u) - theta) <= opt_gate * (1 + std::abs(theta)))
          valid.push_back(u);
      }
      if (!valid.empty()) {
        // flat truncation makes the relaxation exact, so the best extracted
        // value is the sharper statement of the bound
        double fmin = eval_f(valid[0]);
        for (const auto& u : valid) fmin = std::min(fmin, eval_f(u));
        std::vector<double> resids;
        for (const auto& u : valid) resids.push_back(std::abs(eval_f(u) - fmin));
        res.status = PopStatus::MinimizersExtracted;
        res.minimizers = std::move(valid);
        res.extraction_residuals = std::move(resids);
        res.rank = fr.rank;
        res.level = t;
        res.bound = fmin;
        res.order = d;
        return res;
      }
    }
  }
  res.status = have_bound ? PopStatus::BoundOnly : PopStatus::OrderCapReached;
  return res;
}

}  // namespace gnepp
