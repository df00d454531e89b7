#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gnepp {

// Linear SDP in standard primal form with an extra free-variable segment:
//
//   min  sum_j <C_j, X_j> + c_free' u
//   s.t. sum_j <A_kj, X_j> + a_k' u = b_k,   k = 1..m
//        X_j psd, u free.
//
// Constraint rows are sparse: each row lists (block, r, c, v) entries with
// r <= c; an off-diagonal entry v stands for the symmetric pair (so it
// contributes 2*v*X[r][c] to the inner product), plus (free index, v) pairs.
struct SdpProblem {
  struct Entry {
    int block, r, c;
    double v;
  };
  struct Row {
    std::vector<Entry> entries;
    std::vector<std::pair<int, double>> free_entries;
  };

  std::vector<int> block_dims;
  int num_free = 0;
  std::vector<Eigen::MatrixXd> C;  // one per block, symmetric
  Eigen::VectorXd c_free;
  std::vector<Row> rows;
  Eigen::VectorXd b;

  int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, NumericalFailure };

std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> S;
  Eigen::VectorXd y;          // multipliers, one per row
  Eigen::VectorXd free_vals;  // value of the free segment u
  double pobj = 0, dobj = 0;
  double primal_res = 0, dual_res = 0, gap = 0;
  int iters = 0;
};

struct SdpOptions {
  double tol = 1e-9;
  int max_iter = 100;
  bool verbose = false;
};

SdpSolution sdp_solve(const SdpProblem& prob, const SdpOptions& opts = {});

}  // namespace gnepp
