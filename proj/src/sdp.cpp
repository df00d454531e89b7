#include "gnepp/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gnepp {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualInfeasible: return "DualInfeasible";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// <A_k, V> for symmetric V restricted to one block's entries of row k.
double row_dot_block(const SdpProblem::Row& row, int block, const MatrixXd& V) {
  double s = 0;
  for (const auto& e : row.entries)
    if (e.block == block) s += (e.r == e.c) ? e.v * V(e.r, e.r) : 2 * e.v * V(e.r, e.c);
  return s;
}

double row_dot(const SdpProblem::Row& row, const std::vector<MatrixXd>& V, const VectorXd& u) {
  double s = 0;
  for (const auto& e : row.entries)
    s += (e.r == e.c) ? e.v * V[e.block](e.r, e.r) : 2 * e.v * V[e.block](e.r, e.c);
  for (const auto& [idx, v] : row.free_entries) s += v * u[idx];
  return s;
}

// Largest step alpha with X + alpha*dX psd, given X = L L'.
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dX) {
  MatrixXd T = llt.matrixL().solve(dX);
  T = llt.matrixL().solve(T.transpose()).eval();
  double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(
                    0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct Scaling {
  MatrixXd G, Ginv, W;
  VectorXd lambda;
};

}  // namespace

SdpSolution sdp_solve(const SdpProblem& prob, const SdpOptions& opts) {
  const int nb = static_cast<int>(prob.block_dims.size());
  const int m = prob.num_rows();
  const int nf = prob.num_free;
  const int kkt_n = m + nf;
  int ntot = 0;
  for (int d : prob.block_dims) ntot += d;

  SdpSolution sol;
  sol.X.resize(nb);
  sol.S.resize(nb);

  // rows touching each block, for KKT assembly
  std::vector<std::vector<int>> rows_in_block(nb);
  for (int k = 0; k < m; ++k)
    for (const auto& e : prob.rows[k].entries) {
      auto& rb = rows_in_block[e.block];
      if (rb.empty() || rb.back() != k) rb.push_back(k);
    }

  // dense per-block row matrices, only for rows touching the block
  std::vector<std::vector<MatrixXd>> Arow(nb);
  for (int j = 0; j < nb; ++j) {
    Arow[j].assign(rows_in_block[j].size(), MatrixXd::Zero(prob.block_dims[j], prob.block_dims[j]));
    std::vector<int> pos(m, -1);
    for (size_t t = 0; t < rows_in_block[j].size(); ++t) pos[rows_in_block[j][t]] = (int)t;
    for (int k = 0; k < m; ++k)
      for (const auto& e : prob.rows[k].entries)
        if (e.block == j) {
          Arow[j][pos[k]](e.r, e.c) = e.v;
          Arow[j][pos[k]](e.c, e.r) = e.v;
        }
  }

  double data_scale = std::max(1.0, prob.b.size() ? prob.b.cwiseAbs().maxCoeff() : 0.0);
  for (int j = 0; j < nb; ++j)
    data_scale = std::max(data_scale, prob.C[j].cwiseAbs().maxCoeff());
  const double eta = 10.0 * data_scale;

  for (int j = 0; j < nb; ++j) {
    sol.X[j] = eta * MatrixXd::Identity(prob.block_dims[j], prob.block_dims[j]);
    sol.S[j] = sol.X[j];
  }
  sol.y = VectorXd::Zero(m);
  sol.free_vals = VectorXd::Zero(nf);

  const double inf_tol = std::max(opts.tol, 1e-8);
  int tiny_steps = 0;

  // best iterate by worst residual; reported when the iteration stalls
  SdpSolution best = sol;
  double best_metric = std::numeric_limits<double>::infinity();
  int no_progress = 0;

  std::vector<Scaling> sc(nb);
  std::vector<Eigen::LLT<MatrixXd>> lltX(nb), lltS(nb);
  std::vector<MatrixXd> Rd(nb), Rc(nb), dX(nb), dS(nb), dXa(nb), dSa(nb), WAW(nb);

  for (sol.iters = 0; sol.iters < opts.max_iter; ++sol.iters) {
    // residuals
    VectorXd rp = prob.b;
    for (int k = 0; k < m; ++k) rp[k] -= row_dot(prob.rows[k], sol.X, sol.free_vals);
    VectorXd rf = prob.c_free;
    for (int k = 0; k < m; ++k)
      for (const auto& [idx, v] : prob.rows[k].free_entries) rf[idx] -= v * sol.y[k];
    double dres = 0, cnorm = 0, gap_tr = 0;
    sol.pobj = nf ? prob.c_free.dot(sol.free_vals) : 0.0;
    for (int j = 0; j < nb; ++j) {
      Rd[j] = prob.C[j];
      for (size_t t = 0; t < rows_in_block[j].size(); ++t)
        Rd[j] -= sol.y[rows_in_block[j][t]] * Arow[j][t];
      Rd[j] -= sol.S[j];
      dres = std::max(dres, Rd[j].cwiseAbs().maxCoeff());
      cnorm = std::max(cnorm, prob.C[j].cwiseAbs().maxCoeff());
      gap_tr += sol.X[j].cwiseProduct(sol.S[j]).sum();
      sol.pobj += prob.C[j].cwiseProduct(sol.X[j]).sum();
    }
    sol.dobj = prob.b.dot(sol.y);
    double rf_norm = nf ? rf.cwiseAbs().maxCoeff() : 0.0;
    double cf_norm = nf ? prob.c_free.cwiseAbs().maxCoeff() : 0.0;
    sol.primal_res = (m ? rp.cwiseAbs().maxCoeff() : 0.0) /
                     (1 + (m ? prob.b.cwiseAbs().maxCoeff() : 0.0));
    sol.dual_res = std::max(dres / (1 + cnorm), rf_norm / (1 + cf_norm));
    sol.gap = std::abs(sol.pobj - sol.dobj) / (1 + std::abs(sol.pobj) + std::abs(sol.dobj));
    if (opts.verbose)
      std::fprintf(stderr, "it %2d  pobj % .9e  dobj % .9e  rp %.2e rd %.2e gap %.2e\n",
                   sol.iters, sol.pobj, sol.dobj, sol.primal_res, sol.dual_res, sol.gap);

    double metric = std::max({sol.primal_res, sol.dual_res, sol.gap});
    if (metric < 0.9 * best_metric) {
      best_metric = metric;
      best = sol;
      no_progress = 0;
    } else {
      ++no_progress;
    }
    if (sol.primal_res <= opts.tol && sol.dual_res <= opts.tol && sol.gap <= opts.tol) {
      sol.status = SdpStatus::Optimal;
      return sol;
    }
    if (no_progress >= 6) {
      best.status = (best.primal_res <= opts.tol && best.dual_res <= opts.tol &&
                     best.gap <= opts.tol)
                        ? SdpStatus::Optimal
                        : SdpStatus::MaxIter;
      return best;
    }
    // improving-ray certificates
    if (sol.dobj > 0) {
      double ray = 0;  // ||A'y + S|| relative to b'y
      for (int j = 0; j < nb; ++j)
        ray = std::max(ray, (prob.C[j] - Rd[j]).cwiseAbs().maxCoeff());
      if (nf) ray = std::max(ray, (prob.c_free - rf).cwiseAbs().maxCoeff());
      if (ray / sol.dobj <= inf_tol) {
        sol.status = SdpStatus::PrimalInfeasible;
        return sol;
      }
    }
    if (sol.pobj < 0) {
      double ray = m ? (prob.b - rp).cwiseAbs().maxCoeff() : 0.0;
      if (ray / (-sol.pobj) <= inf_tol) {
        sol.status = SdpStatus::DualInfeasible;
        return sol;
      }
    }

    // NT scaling per block
    bool chol_ok = true;
    for (int j = 0; j < nb; ++j) {
      lltX[j].compute(sol.X[j]);
      lltS[j].compute(sol.S[j]);
      if (lltX[j].info() != Eigen::Success || lltS[j].info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      MatrixXd Lx = lltX[j].matrixL(), Ls = lltS[j].matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(Ls.transpose() * Lx,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
      VectorXd sig = svd.singularValues().cwiseMax(1e-150);
      VectorXd isq = sig.cwiseSqrt().cwiseInverse();
      sc[j].G = Lx * svd.matrixV() * isq.asDiagonal();
      sc[j].Ginv = isq.asDiagonal() * svd.matrixU().transpose() * Ls.transpose();
      sc[j].W = sc[j].G * sc[j].G.transpose();
      sc[j].lambda = sig;
    }
    if (!chol_ok) {
      best.status = SdpStatus::NumericalFailure;
      return best;
    }
    const double mu = gap_tr / std::max(1, ntot);

    // KKT matrix, shared by predictor and corrector
    MatrixXd K = MatrixXd::Zero(kkt_n, kkt_n);
    for (int j = 0; j < nb; ++j) {
      const auto& rb = rows_in_block[j];
      for (size_t t = 0; t < rb.size(); ++t) {
        MatrixXd WAjW = sc[j].W * Arow[j][t] * sc[j].W;
        for (size_t s = t; s < rb.size(); ++s) {
          double v = row_dot_block(prob.rows[rb[s]], j, WAjW);
          K(rb[t], rb[s]) += v;
          if (s != t) K(rb[s], rb[t]) += v;
        }
      }
    }
    for (int k = 0; k < m; ++k)
      for (const auto& [idx, v] : prob.rows[k].free_entries) {
        K(k, m + idx) = v;
        K(m + idx, k) = v;
      }
    double reg = 1e-13 * std::max(1.0, K.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < m; ++i) K(i, i) += reg;
    for (int i = m; i < kkt_n; ++i) K(i, i) -= reg;
    Eigen::PartialPivLU<MatrixXd> lu(K);

    auto solve_dir = [&](const std::vector<MatrixXd>& Rcv, std::vector<MatrixXd>& oX,
                         std::vector<MatrixXd>& oS, VectorXd& dy, VectorXd& du) {
      VectorXd rhs(kkt_n);
      for (int k = 0; k < m; ++k) {
        double t = rp[k];
        for (const auto& e : prob.rows[k].entries) {
          const MatrixXd& V = WAW[e.block];  // holds Rc - W Rd W per block
          t -= (e.r == e.c) ? e.v * V(e.r, e.r) : 2 * e.v * V(e.r, e.c);
        }
        rhs[k] = t;
      }
      rhs.tail(nf) = rf;
      VectorXd d = lu.solve(rhs);
      double rhs_scale = std::max(1e-300, rhs.cwiseAbs().maxCoeff());
      for (int ref = 0; ref < 3; ++ref) {
        VectorXd r = rhs - K * d;
        if (r.cwiseAbs().maxCoeff() <= 1e-14 * rhs_scale) break;
        d += lu.solve(r);
      }
      dy = d.head(m);
      du = d.tail(nf);
      for (int j = 0; j < nb; ++j) {
        oS[j] = Rd[j];
        for (size_t t = 0; t < rows_in_block[j].size(); ++t)
          oS[j] -= dy[rows_in_block[j][t]] * Arow[j][t];
        oS[j] = 0.5 * (oS[j] + oS[j].transpose()).eval();
        oX[j] = Rcv[j] - sc[j].W * oS[j] * sc[j].W;
        oX[j] = 0.5 * (oX[j] + oX[j].transpose()).eval();
      }
    };

    // predictor: Rc = -X
    for (int j = 0; j < nb; ++j) {
      Rc[j] = -sol.X[j];
      WAW[j] = Rc[j] - sc[j].W * Rd[j] * sc[j].W;
    }
    VectorXd dy, du;
    solve_dir(Rc, dXa, dSa, dy, du);

    double ap = 1, ad = 1;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, 0.99 * max_step(lltX[j], dXa[j]));
      ad = std::min(ad, 0.99 * max_step(lltS[j], dSa[j]));
    }
    double gap_aff = 0;
    for (int j = 0; j < nb; ++j)
      gap_aff += (sol.X[j] + ap * dXa[j]).cwiseProduct(sol.S[j] + ad * dSa[j]).sum();
    double sigma = std::pow(std::max(0.0, gap_aff / std::max(gap_tr, 1e-300)), 3.0);
    sigma = std::min(1.0, sigma);

    // corrector
    for (int j = 0; j < nb; ++j) {
      const VectorXd& lam = sc[j].lambda;
      MatrixXd dxb = sc[j].Ginv * dXa[j] * sc[j].Ginv.transpose();
      MatrixXd dzb = sc[j].G.transpose() * dSa[j] * sc[j].G;
      MatrixXd R = -0.5 * (dxb * dzb + dzb * dxb);
      for (int a = 0; a < lam.size(); ++a) R(a, a) += sigma * mu - lam[a] * lam[a];
      MatrixXd Rs(lam.size(), lam.size());
      for (int a = 0; a < lam.size(); ++a)
        for (int c = 0; c < lam.size(); ++c) Rs(a, c) = 2 * R(a, c) / (lam[a] + lam[c]);
      Rc[j] = sc[j].G * Rs * sc[j].G.transpose();
      Rc[j] = 0.5 * (Rc[j] + Rc[j].transpose()).eval();
      WAW[j] = Rc[j] - sc[j].W * Rd[j] * sc[j].W;
    }
    solve_dir(Rc, dX, dS, dy, du);

    ap = 1;
    ad = 1;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, 0.99 * max_step(lltX[j], dX[j]));
      ad = std::min(ad, 0.99 * max_step(lltS[j], dS[j]));
    }
    for (int j = 0; j < nb; ++j) {
      sol.X[j] += ap * dX[j];
      sol.S[j] += ad * dS[j];
    }
    sol.y += ad * dy;
    sol.free_vals += ap * du;

    if (std::min(ap, ad) < 1e-10) {
      if (++tiny_steps >= 5) {
        best.status = SdpStatus::NumericalFailure;
        return best;
      }
    } else {
      tiny_steps = 0;
    }
  }
  best.status = SdpStatus::MaxIter;
  return best;
}

}  // namespace gnepp
