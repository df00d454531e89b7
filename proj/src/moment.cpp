#include "gnepp/moment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gnepp {

int MomentBasis::at(const Monomial& m) const {
  auto it = index.find(m);
  if (it == index.end()) throw InputError("monomial outside moment basis");
  return it->second;
}

MomentBasis make_moment_basis(LayoutPtr layout, int block, int d) {
  MomentBasis mb;
  mb.layout = layout;
  mb.block = block;
  mb.d = d;
  mb.monos = monomial_basis(*layout, block, 2 * d);
  for (int i = 0; i < mb.size(); ++i) mb.index.emplace(mb.monos[i], i);
  return mb;
}

double apply_tms(const Polynomial& f, const MomentBasis& mb, const Eigen::VectorXd& y) {
  double s = 0;
  for (const auto& [mono, coef] : f.terms()) s += coef * y[mb.at(mono)];
  return s;
}

Eigen::MatrixXd localizing_matrix(const Polynomial& q, const MomentBasis& mb,
                                  const Eigen::VectorXd& y, int t) {
  std::vector<Monomial> base = monomial_basis(*mb.layout, mb.block, t);
  const int n = static_cast<int>(base.size());
  Eigen::MatrixXd L(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Monomial ab = base[a] * base[b];
      double s = 0;
      for (const auto& [mono, coef] : q.terms()) s += coef * y[mb.at(mono * ab)];
      L(a, b) = L(b, a) = s;
    }
  return L;
}

Eigen::MatrixXd moment_matrix(const MomentBasis& mb, const Eigen::VectorXd& y, int t) {
  return localizing_matrix(Polynomial::constant(mb.layout, 1.0), mb, y, t);
}

Eigen::VectorXd point_moments(const MomentBasis& mb, const Eigen::VectorXd& u) {
  if (u.size() != mb.layout->dim(mb.block)) throw InputError("point dimension mismatch");
  Eigen::VectorXd y(mb.size());
  const int off = mb.layout->offset(mb.block);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mb.layout->total_dim());
  full.segment(off, u.size()) = u;
  for (int i = 0; i < mb.size(); ++i) {
    double v = 1;
    for (int j = 0; j < u.size(); ++j) {
      int e = mb.monos[i].exponent(VarRef{mb.block, j + 1});
      for (int k = 0; k < e; ++k) v *= u[j];
    }
    y[i] = v;
  }
  return y;
}

int relaxation_base_order(const Polynomial& f, const std::vector<Constraint>& cons, int block) {
  int deg = std::max(1, f.degree_in_block(block));
  for (const auto& c : cons) deg = std::max(deg, c.poly.degree_in_block(block));
  return (deg + 1) / 2;
}

int truncation_gap(const std::vector<Constraint>& cons, int block) {
  int d1 = 1;
  for (const auto& c : cons) d1 = std::max(d1, (c.poly.degree_in_block(block) + 1) / 2);
  return d1;
}

MomentRelaxation build_moment_relaxation(const Polynomial& f,
                                         const std::vector<Constraint>& cons, int block, int d) {
  if (!f.supported_on_block(block)) throw InputError("objective not supported on block");
  for (const auto& c : cons)
    if (!c.poly.supported_on_block(block)) throw InputError("constraint not supported on block");
  if (f.degree() > 2 * d) throw InputError("relaxation order too small for objective");
  for (const auto& c : cons)
    if (c.poly.degree() > 2 * d) throw InputError("relaxation order too small for constraint");

  MomentRelaxation rel;
  rel.basis = make_moment_basis(f.layout() ? f.layout() : cons.at(0).poly.layout(), block, d);
  const MomentBasis& mb = rel.basis;
  SdpProblem& sdp = rel.sdp;
  sdp.num_free = mb.size();
  sdp.c_free = Eigen::VectorXd::Zero(mb.size());
  for (const auto& [mono, coef] : f.terms()) sdp.c_free[mb.at(mono)] += coef;

  auto add_psd_block = [&](const Polynomial& q, int t) {
    std::vector<Monomial> base = monomial_basis(*mb.layout, mb.block, t);
    const int n = static_cast<int>(base.size());
    const int j = static_cast<int>(sdp.block_dims.size());
    sdp.block_dims.push_back(n);
    sdp.C.push_back(Eigen::MatrixXd::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        SdpProblem::Row row;
        row.entries.push_back({j, a, b, a == b ? 1.0 : 0.5});
        Monomial ab = base[a] * base[b];
        std::map<int, double> fr;
        for (const auto& [mono, coef] : q.terms()) fr[mb.at(mono * ab)] -= coef;
        for (const auto& [idx, v] : fr)
          if (std::abs(v) > 0) row.free_entries.emplace_back(idx, v);
        sdp.rows.push_back(std::move(row));
      }
    return j;
  };

  // moment matrix block
  add_psd_block(Polynomial::constant(mb.layout, 1.0), d);

  std::set<std::vector<std::pair<int, double>>> seen_eq;
  rel.localizer_block.assign(cons.size(), -1);
  for (size_t ci = 0; ci < cons.size(); ++ci) {
    const Polynomial& g = cons[ci].poly;
    if (g.is_zero()) continue;
    int dg = (g.degree() + 1) / 2;
    if (cons[ci].rel == Relation::Geq) {
      // scale to unit leading size: the feasible set is unchanged and tiny
      // coefficients no longer vanish against the solver tolerance
      rel.localizer_block[ci] = add_psd_block(g.scaled(1.0 / g.max_abs_coeff()), d - dg);
    } else {
      // <h * x^delta, y> = 0 for all delta with deg <= 2(d - dh)
      for (const Monomial& delta : monomial_basis(*mb.layout, mb.block, 2 * (d - dg))) {
        std::map<int, double> fr;
        for (const auto& [mono, coef] : g.terms()) fr[mb.at(mono * delta)] += coef;
        std::vector<std::pair<int, double>> key(fr.begin(), fr.end());
        double scale = 0;
        for (auto& [idx, v] : key) scale = std::max(scale, std::abs(v));
        if (scale == 0) continue;
        if (key.front().second < 0) scale = -scale;
        for (auto& [idx, v] : key) v /= scale;
        if (!seen_eq.insert(key).second) continue;
        SdpProblem::Row row;
        row.free_entries = key;
        sdp.rows.push_back(std::move(row));
      }
    }
  }

  // y_0 = 1
  SdpProblem::Row unit;
  unit.free_entries.emplace_back(0, 1.0);
  sdp.rows.push_back(std::move(unit));

  sdp.b = Eigen::VectorXd::Zero(sdp.num_rows());
  sdp.b[sdp.num_rows() - 1] = 1.0;
  return rel;
}

}  // namespace gnepp
