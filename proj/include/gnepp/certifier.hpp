#pragma once

#include <string>

#include "gnepp/instance.hpp"
#include "gnepp/sdp.hpp"

namespace gnepp {

// Variables (x, y_i) for player i: the original blocks plus block N+1 of the
// same dimension as block i, holding the y_i copy.
LayoutPtr extended_layout(const GneppInstance& inst, int i);

// f_i(y_i, x_{-i}) - f_i(x_i, x_{-i}) over the extended layout.
Polynomial delta_f(const GneppInstance& inst, int i);

// The defining tuple of K_i: h[0] = 1, then player i's constraints in the
// x copy and the y_i copy (equalities as +/- pairs), with delta_f last.
struct KiTuple {
  LayoutPtr ext_layout;
  std::vector<Polynomial> h;
  Polynomial delta_f;
};

KiTuple build_ki(const GneppInstance& inst, int i);

struct GpgCertificate {
  int degree = 0;  // P lives in [x]_{2*degree}
  Polynomial P;    // over the instance layout
  std::vector<std::vector<Eigen::MatrixXd>> Q0, Q1;  // per player, per tuple entry
  std::vector<double> identity_residual;  // coefficient mismatch per player
  double min_gram_eig = 0;
};

struct CertifyResult {
  bool certified = false;
  int degree_used = 0;
  GpgCertificate cert;
  SdpStatus sdp_status = SdpStatus::NumericalFailure;
  std::string message;
};

struct CertifyOptions {
  int degree = -1;        // -1: max_i ceil(deg f_i / 2) + 1
  double cert_tol = 1e-6;
  double sdp_tol = 1e-9;
  bool retry_next_degree = true;
  bool verbose = false;
};

CertifyResult certify(const GneppInstance& inst, const CertifyOptions& opts = {});

// Check a hand-supplied certificate: P over the instance layout, and per
// player the pair (p_{i,0}, p_{i,1}) over that player's extended layout.
struct ManualCheckReport {
  std::vector<double> residual;  // coefficient infinity-norm per player
  double worst = 0;
  bool identity_ok = false;
  std::vector<double> min_sampled[2];  // min sampled value of p0 / p1 on K_i
  bool nonneg_ok = true;               // sampling is a falsifier, not a proof
  std::string message;
};

ManualCheckReport check_manual(const GneppInstance& inst, const Polynomial& P,
                               const std::vector<std::pair<Polynomial, Polynomial>>& multipliers,
                               double cert_tol = 1e-6, unsigned seed = 1);

}  // namespace gnepp
