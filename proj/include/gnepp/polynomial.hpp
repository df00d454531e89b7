#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnepp {

/// Thrown for malformed user input (bad files, dimension mismatches, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A variable is addressed as (player block, coordinate), both 1-based.
struct VarRef {
  int block = 0;
  int coord = 0;
  auto operator<=>(const VarRef&) const = default;
};

/// Ordered list of per-player block dimensions; player indices are 1..N.
class BlockLayout {
 public:
  BlockLayout() = default;
  explicit BlockLayout(std::vector<int> dims);

  int players() const { return static_cast<int>(dims_.size()); }
  int dim(int block) const;
  int total_dim() const { return total_; }
  /// Start of block `block` in the flattened variable vector.
  int offset(int block) const;
  /// Position of a variable in the flattened vector.
  int flat(VarRef v) const { return offset(v.block) + v.coord - 1; }
  bool contains(VarRef v) const {
    return v.block >= 1 && v.block <= players() && v.coord >= 1 && v.coord <= dim(v.block);
  }

  bool operator==(const BlockLayout& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

using LayoutPtr = std::shared_ptr<const BlockLayout>;

/// Sparse monomial: positive exponents only, factors sorted by variable.
class Monomial {
 public:
  Monomial() = default;
  static Monomial variable(VarRef v, int exp = 1);

  int degree() const { return degree_; }
  int exponent(VarRef v) const;
  const std::vector<std::pair<VarRef, int>>& factors() const { return factors_; }

  Monomial operator*(const Monomial& o) const;
  bool operator==(const Monomial& o) const {
    return degree_ == o.degree_ && factors_ == o.factors_;
  }

  /// Degree restricted to one block.
  int degree_in_block(int block) const;

  std::string str() const;

 private:
  friend struct GradedLess;
  friend class Polynomial;
  std::vector<std::pair<VarRef, int>> factors_;
  int degree_ = 0;
};

/// Graded order: by total degree, then alphabetically within a grade
/// (higher exponent on the earlier variable comes first).
struct GradedLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with real coefficients over a BlockLayout.
class Polynomial {
 public:
  /// Terms with |coeff| below this are dropped after every operation.
  static constexpr double kCoeffEps = 1e-14;

  Polynomial() = default;
  explicit Polynomial(LayoutPtr layout) : layout_(std::move(layout)) {}
  static Polynomial constant(LayoutPtr layout, double c);
  static Polynomial variable(LayoutPtr layout, VarRef v);
  static Polynomial variable(LayoutPtr layout, int block, int coord) {
    return variable(std::move(layout), VarRef{block, coord});
  }

  const LayoutPtr& layout() const { return layout_; }
  const std::map<Monomial, double, GradedLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  int degree_in_block(int block) const;
  double coefficient(const Monomial& m) const;
  /// Largest |coefficient|; 0 for the zero polynomial.
  double max_abs_coeff() const;
  /// True when the support only mentions variables of `block`.
  bool supported_on_block(int block) const;

  void add_term(const Monomial& m, double c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(double c) const;
  Polynomial pow(int e) const;

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }

  /// Evaluate at a full assignment (flattened in layout order).
  double eval(const Eigen::VectorXd& point) const;

  /// Substitute every block except `block` with values from `point`
  /// (entries of `block` in `point` are ignored). The result's support
  /// mentions only block-`block` variables.
  /// Partial derivative with respect to one variable.
  Polynomial derivative(VarRef v) const;

  Polynomial restrict_to_block(int block, const Eigen::VectorXd& point) const;

  /// Rename all variables of block `from` to the same coordinates of
  /// block `to` under `new_layout`.
  Polynomial rename_block(int from, int to, LayoutPtr new_layout) const;

  /// Reinterpret over a wider layout (same block dims for existing blocks).
  Polynomial with_layout(LayoutPtr new_layout) const;

  std::string str() const;

 private:
  void check_same_layout(const Polynomial& o) const;
  LayoutPtr layout_;
  std::map<Monomial, double, GradedLess> terms_;
};

/// All monomials of block `block` with degree <= d, graded order.
/// Length is binom(n_block + d, d).
std::vector<Monomial> monomial_basis(const BlockLayout& layout, int block, int d);

/// Exponent tuples over `nvars` variables with degree <= d, graded order.
std::vector<std::vector<int>> exponent_tuples(int nvars, int d);

std::uint64_t binomial(int n, int k);

}  // namespace gnepp
