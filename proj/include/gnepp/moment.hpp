#pragma once

#include <map>
#include <vector>

#include "gnepp/instance.hpp"
#include "gnepp/sdp.hpp"

namespace gnepp {

// Monomial index space [x]_{2d} for one block, graded order; monos[0] = 1.
struct MomentBasis {
  LayoutPtr layout;
  int block = 1;
  int d = 0;
  std::vector<Monomial> monos;
  std::map<Monomial, int, GradedLess> index;

  int size() const { return static_cast<int>(monos.size()); }
  int at(const Monomial& m) const;
};

MomentBasis make_moment_basis(LayoutPtr layout, int block, int d);

// <f, y> — pairing of a polynomial supported on the block with a tms.
double apply_tms(const Polynomial& f, const MomentBasis& mb, const Eigen::VectorXd& y);

// Localizing matrix L_q^{(t)}[y] over the basis [x]_t; q = 1 gives M_t[y].
Eigen::MatrixXd localizing_matrix(const Polynomial& q, const MomentBasis& mb,
                                  const Eigen::VectorXd& y, int t);

Eigen::MatrixXd moment_matrix(const MomentBasis& mb, const Eigen::VectorXd& y, int t);

// Moments of the point mass at u, i.e. y = [u]_{2d}.
Eigen::VectorXd point_moments(const MomentBasis& mb, const Eigen::VectorXd& u);

// Order-d moment relaxation of min f(x) s.t. constraints, in standard SDP form.
// Free variables are the tms y; block 0 is the moment matrix; each inequality
// gets a localizing block; equalities collapse to linear rows on y; y_0 = 1.
struct MomentRelaxation {
  MomentBasis basis;
  SdpProblem sdp;
  std::vector<int> localizer_block;  // per constraint: block index, or -1 (equality/skipped)
};

MomentRelaxation build_moment_relaxation(const Polynomial& f,
                                         const std::vector<Constraint>& cons, int block, int d);

// ceil(deg/2) of the highest-degree polynomial involved (the base order d_0).
int relaxation_base_order(const Polynomial& f, const std::vector<Constraint>& cons, int block);

// max over constraints of ceil(deg/2), at least 1 (the flat-truncation gap d_1).
int truncation_gap(const std::vector<Constraint>& cons, int block);

}  // namespace gnepp
