#include "gnepp/certifier.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "gnepp/sdp.hpp"

namespace gnepp {

namespace {

// monomials in every variable of the layout, degree <= d, graded order
std::vector<Monomial> full_basis(const BlockLayout& ly, int d) {
  std::vector<VarRef> vars;
  for (int b = 1; b <= ly.players(); ++b)
    for (int j = 1; j <= ly.dim(b); ++j) vars.push_back({b, j});
  std::vector<Monomial> out;
  for (const auto& e : exponent_tuples(static_cast<int>(vars.size()), d)) {
    Monomial m;
    for (size_t k = 0; k < vars.size(); ++k)
      if (e[k] > 0) m = m * Monomial::variable(vars[k], e[k]);
    out.push_back(m);
  }
  return out;
}

Monomial rename_mono(const Monomial& m, int from, int to) {
  Monomial out;
  for (const auto& [v, e] : m.factors())
    out = out * Monomial::variable(v.block == from ? VarRef{to, v.coord} : v, e);
  return out;
}

}  // namespace

LayoutPtr extended_layout(const GneppInstance& inst, int i) {
  std::vector<int> dims;
  for (int b = 1; b <= inst.layout->players(); ++b) dims.push_back(inst.layout->dim(b));
  dims.push_back(inst.layout->dim(i));
  return std::make_shared<BlockLayout>(dims);
}

Polynomial delta_f(const GneppInstance& inst, int i) {
  LayoutPtr ext = extended_layout(inst, i);
  Polynomial f = inst.players[i - 1].objective.with_layout(ext);
  return f.rename_block(i, inst.num_players() + 1, ext) - f;
}

KiTuple build_ki(const GneppInstance& inst, int i) {
  KiTuple ki;
  ki.ext_layout = extended_layout(inst, i);
  const int ycopy = inst.num_players() + 1;
  ki.h.push_back(Polynomial::constant(ki.ext_layout, 1.0));
  for (const auto& c : inst.players[i - 1].constraints) {
    Polynomial hx = c.poly.with_layout(ki.ext_layout);
    Polynomial hy = hx.rename_block(i, ycopy, ki.ext_layout);
    ki.h.push_back(hx);
    if (c.rel == Relation::Eq) ki.h.push_back(-hx);
    if (!(hy - hx).is_zero()) {
      ki.h.push_back(hy);
      if (c.rel == Relation::Eq) ki.h.push_back(-hy);
    }
  }
  ki.delta_f = delta_f(inst, i);
  ki.h.push_back(ki.delta_f);
  return ki;
}

namespace {

struct Attempt {
  SdpProblem sdp;
  std::vector<Monomial> p_monos;          // free index -> monomial of [x]_{2d}\{1}
  std::vector<KiTuple> ki;                // per player
  std::vector<std::vector<int>> block0;   // per player, per t: Q_{i,0} block or -1
  std::vector<std::vector<int>> block1;   // per player, per t: Q_{i,1} block or -1
  std::vector<std::vector<std::vector<Monomial>>> gram_basis;  // per player, per t
};

Attempt assemble(const GneppInstance& inst, int d) {
  Attempt at;
  SdpProblem& sdp = at.sdp;
  const int N = inst.num_players();

  for (const Monomial& m : full_basis(*inst.layout, 2 * d))
    if (m.degree() > 0) at.p_monos.push_back(m);
  sdp.num_free = static_cast<int>(at.p_monos.size());
  sdp.c_free = Eigen::VectorXd::Zero(sdp.num_free);

  std::vector<double> rhs;
  at.block0.resize(N);
  at.block1.resize(N);
  at.gram_basis.resize(N);
  for (int i = 1; i <= N; ++i) {
    KiTuple ki = build_ki(inst, i);
    std::map<Monomial, int, GradedLess> rowmap;
    auto row_of = [&](const Monomial& m) {
      auto [it, fresh] = rowmap.emplace(m, sdp.num_rows());
      if (fresh) {
        sdp.rows.emplace_back();
        rhs.push_back(0.0);
      }
      return it->second;
    };

    // right-hand side: coefficients of delta_f
    for (const auto& [mono, coef] : ki.delta_f.terms()) rhs[row_of(mono)] += coef;

    // delta-P contributions from the free coefficients p
    for (int pi = 0; pi < sdp.num_free; ++pi) {
      const Monomial& g = at.p_monos[pi];
      Monomial gy = rename_mono(g, i, N + 1);
      if (gy == g) continue;  // no x_i part: cancels in the difference
      sdp.rows[row_of(gy)].free_entries.emplace_back(pi, 1.0);
      sdp.rows[row_of(g)].free_entries.emplace_back(pi, -1.0);
    }

    // Gram blocks for q_{i,0} (multiplies delta_f) and q_{i,1}
    const int m_i = static_cast<int>(ki.h.size());
    at.block0[i - 1].assign(m_i, -1);
    at.block1[i - 1].assign(m_i, -1);
    at.gram_basis[i - 1].resize(m_i);
    for (int t = 0; t < m_i; ++t) {
      int dit = (ki.h[t].degree() + 1) / 2;
      int td = d - dit;
      if (td < 0) continue;
      std::vector<Monomial> base = full_basis(*ki.ext_layout, td);
      at.gram_basis[i - 1][t] = base;
      const int nbas = static_cast<int>(base.size());
      for (int j = 0; j < 2; ++j) {
        Polynomial mult = (j == 0) ? ki.h[t] * ki.delta_f : ki.h[t];
        int blk = static_cast<int>(sdp.block_dims.size());
        sdp.block_dims.push_back(nbas);
        sdp.C.push_back(Eigen::MatrixXd::Identity(nbas, nbas));
        (j == 0 ? at.block0 : at.block1)[i - 1][t] = blk;
        for (int a = 0; a < nbas; ++a)
          for (int b = a; b < nbas; ++b) {
            Monomial pm = base[a] * base[b];
            for (const auto& [mono, coef] : mult.terms())
              sdp.rows[row_of(mono * pm)].entries.push_back({blk, a, b, -coef});
          }
      }
    }
    at.ki.push_back(std::move(ki));
  }
  sdp.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<int>(rhs.size()));
  return at;
}

Polynomial gram_poly(const std::vector<Monomial>& base, const Eigen::MatrixXd& Q,
                     LayoutPtr layout) {
  Polynomial q(layout);
  const int n = static_cast<int>(base.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Polynomial term(layout);
      term.add_term(base[a] * base[b], Q(a, b));
      q += term;
    }
  return q;
}

}  // namespace

CertifyResult certify(const GneppInstance& inst, const CertifyOptions& opts) {
  std::ostringstream msg;
  const int N = inst.num_players();

  // syntactic screening of the shared-constraint structure
  std::multiset<std::string> first;
  bool same = true;
  for (int i = 1; i <= N; ++i) {
    std::multiset<std::string> cur;
    for (const auto& c : inst.players[i - 1].constraints)
      cur.insert(c.poly.str() + (c.rel == Relation::Eq ? "==0" : ">=0"));
    if (i == 1)
      first = cur;
    else if (cur != first)
      same = false;
  }
  if (!same)
    msg << "warning: players' constraint lists differ syntactically; the "
           "shared-feasible-set premise could not be confirmed\n";

  int d0 = 1;
  for (const auto& pl : inst.players) d0 = std::max(d0, (pl.objective.degree() + 1) / 2 + 1);
  int d = opts.degree > 0 ? opts.degree : d0;
  int tries = (opts.degree > 0 || !opts.retry_next_degree) ? 1 : 2;

  CertifyResult res;
  for (int attempt = 0; attempt < tries; ++attempt, ++d) {
    Attempt at = assemble(inst, d);
    SdpOptions so;
    so.tol = opts.sdp_tol;
    so.verbose = opts.verbose;
    SdpSolution sol = sdp_solve(at.sdp, so);
    res.sdp_status = sol.status;
    res.degree_used = d;
    if (sol.status == SdpStatus::PrimalInfeasible) {
      msg << "degree " << d << ": sdp PrimalInfeasible (no certificate at this degree)\n";
      continue;
    }
    // the trace objective is only a regularizer: any feasible Gram solution
    // is a certificate, so judge by the re-expanded identity, not SDP status
    if (sol.status != SdpStatus::Optimal)
      msg << "degree " << d << ": sdp " << to_string(sol.status)
          << "; checking the returned certificate anyway\n";

    GpgCertificate cert;
    cert.degree = d;
    cert.P = Polynomial(inst.layout);
    for (size_t pi = 0; pi < at.p_monos.size(); ++pi)
      cert.P.add_term(at.p_monos[pi], sol.free_vals[static_cast<int>(pi)]);
    cert.min_gram_eig = 0;
    cert.Q0.resize(N);
    cert.Q1.resize(N);
    bool ok = true;
    for (int i = 1; i <= N; ++i) {
      const KiTuple& ki = at.ki[i - 1];
      Polynomial q0(ki.ext_layout), q1(ki.ext_layout);
      for (size_t t = 0; t < ki.h.size(); ++t) {
        for (int j = 0; j < 2; ++j) {
          int blk = (j == 0 ? at.block0 : at.block1)[i - 1][t];
          if (blk < 0) {
            (j == 0 ? cert.Q0 : cert.Q1)[i - 1].emplace_back();
            continue;
          }
          const Eigen::MatrixXd& Q = sol.X[blk];
          (j == 0 ? cert.Q0 : cert.Q1)[i - 1].push_back(Q);
          double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
          cert.min_gram_eig = std::min(cert.min_gram_eig == 0 ? lmin : cert.min_gram_eig, lmin);
          Polynomial sig = gram_poly(at.gram_basis[i - 1][t], Q, ki.ext_layout);
          (j == 0 ? q0 : q1) += sig * ki.h[t];
        }
      }
      Polynomial Pe = cert.P.with_layout(ki.ext_layout);
      Polynomial dP = Pe.rename_block(i, N + 1, ki.ext_layout) - Pe;
      Polynomial resid = dP - (q0 + Polynomial::constant(ki.ext_layout, 1.0)) * ki.delta_f - q1;
      double r = resid.max_abs_coeff();
      cert.identity_residual.push_back(r);
      // a stalled solve leaves noise of roughly the solver's residual in the
      // Gram entries, so demand a clear margin before trusting the identity
      double tol = (sol.status == SdpStatus::Optimal) ? opts.cert_tol : 0.1 * opts.cert_tol;
      if (r > tol) ok = false;
    }
    if (cert.min_gram_eig < -opts.cert_tol) ok = false;
    res.cert = std::move(cert);
    if (ok) {
      res.certified = true;
      msg << "certified at degree " << d << "\n";
      break;
    }
    msg << "degree " << d << ": identity residual too large\n";
  }
  res.message = msg.str();
  return res;
}

ManualCheckReport check_manual(const GneppInstance& inst, const Polynomial& P,
                               const std::vector<std::pair<Polynomial, Polynomial>>& multipliers,
                               double cert_tol, unsigned seed) {
  if (static_cast<int>(multipliers.size()) != inst.num_players())
    throw InputError("one multiplier pair per player required");
  ManualCheckReport rep;
  std::ostringstream msg;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const int N = inst.num_players();
  for (int i = 1; i <= N; ++i) {
    KiTuple ki = build_ki(inst, i);
    Polynomial p0 = multipliers[i - 1].first.with_layout(ki.ext_layout);
    Polynomial p1 = multipliers[i - 1].second.with_layout(ki.ext_layout);
    Polynomial Pe = P.with_layout(ki.ext_layout);
    Polynomial dP = Pe.rename_block(i, N + 1, ki.ext_layout) - Pe;
    Polynomial resid = dP - (p0 + Polynomial::constant(ki.ext_layout, 1.0)) * ki.delta_f - p1;
    double r = resid.max_abs_coeff();
    rep.residual.push_back(r);
    rep.worst = std::max(rep.worst, r);

    // spot-check nonnegativity of p0, p1 on K_i by rejection sampling
    double m0 = 0, m1 = 0;
    int accepted = 0;
    Eigen::VectorXd pt(ki.ext_layout->total_dim());
    for (int trial = 0; trial < 20000 && accepted < 1000; ++trial) {
      for (int v = 0; v < pt.size(); ++v) pt[v] = unif(rng);
      bool feas = true;
      for (const auto& h : ki.h)
        if (h.eval(pt) < -1e-9) {
          feas = false;
          break;
        }
      if (!feas) continue;
      ++accepted;
      m0 = std::min(m0, p0.eval(pt));
      m1 = std::min(m1, p1.eval(pt));
    }
    if (accepted == 0) msg << "player " << i << ": no sample points found in K_i\n";
    rep.min_sampled[0].push_back(m0);
    rep.min_sampled[1].push_back(m1);
    if (m0 < -cert_tol || m1 < -cert_tol) rep.nonneg_ok = false;
  }
  rep.identity_ok = rep.worst <= cert_tol;
  rep.message = msg.str();
  return rep;
}

}  // namespace gnepp
