#include "gnepp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gnepp {

BlockLayout::BlockLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InputError("layout needs at least one block");
  offsets_.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) throw InputError("block dimension must be >= 1");
    offsets_[i] = total_;
    total_ += dims_[i];
  }
}

int BlockLayout::dim(int block) const {
  if (block < 1 || block > players()) throw InputError("block index out of range");
  return dims_[block - 1];
}

int BlockLayout::offset(int block) const {
  if (block < 1 || block > players()) throw InputError("block index out of range");
  return offsets_[block - 1];
}

Monomial Monomial::variable(VarRef v, int exp) {
  Monomial m;
  if (exp > 0) {
    m.factors_.push_back({v, exp});
    m.degree_ = exp;
  }
  return m;
}

int Monomial::exponent(VarRef v) const {
  for (const auto& [var, e] : factors_)
    if (var == v) return e;
  return 0;
}

int Monomial::degree_in_block(int block) const {
  int d = 0;
  for (const auto& [var, e] : factors_)
    if (var.block == block) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + o.factors_.size());
  auto a = factors_.begin(), b = o.factors_.begin();
  while (a != factors_.end() || b != o.factors_.end()) {
    if (b == o.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.push_back({a->first, a->second + b->second});
      ++a, ++b;
    }
  }
  out.degree_ = degree_ + o.degree_;
  return out;
}

std::string Monomial::str() const {
  if (factors_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, e] : factors_) {
    if (!first) os << "*";
    first = false;
    os << "x" << v.block << "_" << v.coord;
    if (e > 1) os << "^" << e;
  }
  return os.str();
}

bool GradedLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  auto ia = a.factors_.begin(), ib = b.factors_.begin();
  while (ia != a.factors_.end() && ib != b.factors_.end()) {
    if (ia->first < ib->first) return true;   // a uses an earlier variable
    if (ib->first < ia->first) return false;
    if (ia->second != ib->second) return ia->second > ib->second;
    ++ia, ++ib;
  }
  // Same degree with one list a prefix of the other only happens for
  // identical monomials.
  return false;
}

Polynomial Polynomial::constant(LayoutPtr layout, double c) {
  Polynomial p(std::move(layout));
  p.add_term(Monomial{}, c);
  return p;
}

Polynomial Polynomial::variable(LayoutPtr layout, VarRef v) {
  if (!layout->contains(v)) throw InputError("variable outside layout");
  Polynomial p(std::move(layout));
  p.add_term(Monomial::variable(v), 1.0);
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

int Polynomial::degree_in_block(int block) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in_block(block));
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coeff() const {
  double v = 0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

bool Polynomial::supported_on_block(int block) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.factors())
      if (v.block != block) return false;
  return true;
}

void Polynomial::add_term(const Monomial& m, double c) {
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kCoeffEps) terms_.erase(it);
}

void Polynomial::check_same_layout(const Polynomial& o) const {
  if (layout_ && o.layout_ && !(*layout_ == *o.layout_))
    throw InputError("polynomial layout mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_same_layout(o);
  Polynomial out = *this;
  if (!out.layout_) out.layout_ = o.layout_;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  check_same_layout(o);
  Polynomial out = *this;
  if (!out.layout_) out.layout_ = o.layout_;
  for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator-() const { return scaled(-1.0); }

Polynomial Polynomial::scaled(double c) const {
  Polynomial out(layout_);
  for (const auto& [m, v] : terms_) out.add_term(m, v * c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_same_layout(o);
  Polynomial out(layout_ ? layout_ : o.layout_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw InputError("negative exponent");
  Polynomial out = constant(layout_, 1.0);
  for (int i = 0; i < e; ++i) out = out * *this;
  return out;
}

double Polynomial::eval(const Eigen::VectorXd& point) const {
  if (!layout_ || point.size() != layout_->total_dim())
    throw InputError("evaluation point has wrong dimension");
  double sum = 0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (const auto& [v, e] : m.factors()) {
      double x = point[layout_->flat(v)];
      for (int k = 0; k < e; ++k) t *= x;
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::derivative(VarRef v) const {
  Polynomial out(layout_);
  for (const auto& [mono, coef] : terms_) {
    int e = mono.exponent(v);
    if (e == 0) continue;
    Monomial m;
    for (const auto& [var, exp] : mono.factors()) {
      int ne = (var == v) ? exp - 1 : exp;
      if (ne > 0) m = m * Monomial::variable(var, ne);
    }
    out.add_term(m, coef * e);
  }
  return out;
}

Polynomial Polynomial::restrict_to_block(int block, const Eigen::VectorXd& point) const {
  if (!layout_ || point.size() != layout_->total_dim())
    throw InputError("restriction point has wrong dimension");
  Polynomial out(layout_);
  for (const auto& [m, c] : terms_) {
    double coef = c;
    Monomial kept;
    for (const auto& [v, e] : m.factors()) {
      if (v.block == block) {
        kept = kept * Monomial::variable(v, e);
      } else {
        double x = point[layout_->flat(v)];
        for (int k = 0; k < e; ++k) coef *= x;
      }
    }
    out.add_term(kept, coef);
  }
  return out;
}

Polynomial Polynomial::rename_block(int from, int to, LayoutPtr new_layout) const {
  Polynomial out(std::move(new_layout));
  for (const auto& [m, c] : terms_) {
    Monomial renamed;
    for (const auto& [v, e] : m.factors()) {
      VarRef w = (v.block == from) ? VarRef{to, v.coord} : v;
      if (!out.layout()->contains(w)) throw InputError("rename outside layout");
      renamed = renamed * Monomial::variable(w, e);
    }
    out.add_term(renamed, c);
  }
  return out;
}

Polynomial Polynomial::with_layout(LayoutPtr new_layout) const {
  Polynomial out(std::move(new_layout));
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.factors())
      if (!out.layout()->contains(v)) throw InputError("layout does not cover support");
    out.add_term(m, c);
  }
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    double v = c;
    if (first) {
      if (v < 0) { os << "- "; v = -v; }
    } else {
      os << (v < 0 ? " - " : " + ");
      v = std::abs(v);
    }
    first = false;
    if (m.degree() == 0) {
      os << v;
    } else {
      if (v != 1.0) os << v << "*";
      os << m.str();
    }
  }
  return os.str();
}

std::vector<std::vector<int>> exponent_tuples(int nvars, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(nvars, 0);
  // grade by total degree; within a grade, lexicographic with the earlier
  // variable's exponent descending
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      cur[var] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[var] = e;
      self(self, var + 1, remaining - e);
    }
  };
  for (int g = 0; g <= d; ++g) {
    if (nvars == 0) {
      if (g == 0) out.push_back({});
      continue;
    }
    rec(rec, 0, g);
  }
  return out;
}

std::vector<Monomial> monomial_basis(const BlockLayout& layout, int block, int d) {
  int n = layout.dim(block);
  std::vector<Monomial> out;
  for (const auto& exps : exponent_tuples(n, d)) {
    Monomial m;
    for (int j = 0; j < n; ++j)
      if (exps[j] > 0) m = m * Monomial::variable(VarRef{block, j + 1}, exps[j]);
    out.push_back(m);
  }
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

}  // namespace gnepp
