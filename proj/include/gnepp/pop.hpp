#pragma once

#include <limits>
#include <string>

#include "gnepp/moment.hpp"

namespace gnepp {

enum class PopStatus { Infeasible, MinimizersExtracted, BoundOnly, OrderCapReached };

std::string to_string(PopStatus s);

struct PopResult {
  PopStatus status = PopStatus::OrderCapReached;
  int order = 0;                 // relaxation order d actually used
  double bound = std::numeric_limits<double>::quiet_NaN();  // theta_d
  std::vector<Eigen::VectorXd> minimizers;                  // block-local coordinates
  std::vector<double> extraction_residuals;                 // |f(u) - bound| per point
  int rank = 0;       // flat-truncation rank r
  int level = 0;      // flat-truncation level t
  SdpStatus sdp_status = SdpStatus::NumericalFailure;
};

struct PopOptions {
  int d_max = -1;           // absolute cap; -1 means d_0 + order_cap_offset
  int order_cap_offset = 3;
  double rank_tol = 1e-6;
  double feastol = 1e-8;
  double opt_tol = 1e-6;
  double sdp_tol = 1e-9;
  unsigned seed = 0;
  bool verbose = false;
};

// number of eigenvalues of symmetric M exceeding tol * max(|lambda|_max, 1)
int numeric_rank(const Eigen::MatrixXd& M, double tol);

struct FlatResult {
  bool holds = false;
  int rank = 0;
};

FlatResult flat_truncation(const Eigen::VectorXd& y, const MomentBasis& mb, int d1, int t,
                           double rank_tol);

std::vector<Eigen::VectorXd> extract_minimizers(const Eigen::VectorXd& y, const MomentBasis& mb,
                                                int t, int d1, int rank, double rank_tol,
                                                unsigned seed);

PopResult pop_minimize(const Polynomial& f, const std::vector<Constraint>& cons, int block,
                       const PopOptions& opts = {});

}  // namespace gnepp
