#pragma once

#include <optional>
#include <string>

#include "gnepp/pop.hpp"

namespace gnepp {

enum class TauRule { Fixed, Adaptive, Zero };

enum class GsStatus {
  Converged,
  CycleDetected,
  SubproblemInfeasible,
  MaxIterReached,
  SubproblemFailed
};

std::string to_string(GsStatus s);
std::string to_string(TauRule r);

struct GsConfig {
  double tau0 = 0.1;
  TauRule rule = TauRule::Adaptive;
  int max_iter = 200;
  int conv_window = 11;    // number of trailing iterates compared pairwise
  double conv_tol = 1e-8;  // infinity-norm threshold for the window
  PopOptions pop;
  bool verbose = false;
};

struct GsTrace {
  GsStatus status = GsStatus::MaxIterReached;
  std::vector<Eigen::VectorXd> iterates;  // x^(0), x^(1), ...
  std::vector<double> tau_history;        // tau^(0), tau^(1), ...
  int cycle_period = 0;  // in per-player updates
  std::vector<Eigen::VectorXd> cycle_states;  // one detected cycle, oldest first
  int fail_iter = -1;    // k of SubproblemInfeasible/Failed
  int fail_player = 0;   // i of SubproblemInfeasible/Failed
  std::string message;   // warnings and failure context
  double wall_seconds = 0;

  const Eigen::VectorXd& x() const { return iterates.back(); }
  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

GsTrace gs_solve(const GneppInstance& inst, const Eigen::VectorXd& x0, const GsConfig& cfg);

// tau^(k+1) from tau^(k) and the latest sweep.
double update_tau(double tau, const Eigen::VectorXd& xnew, const Eigen::VectorXd& xold,
                  const BlockLayout& layout, TauRule rule);

// Smallest period p <= 12 such that the last 3p iterates repeat with period p
// within tol (infinity norm); requires at least 4 iterates.
std::optional<int> detect_cycle(const std::vector<Eigen::VectorXd>& iterates, double tol = 1e-6);

struct GneReport {
  std::vector<double> eps;    // per-player optimality gap f_i(x) - f_i*
  std::vector<double> fstar;  // per-player verified optimal values
  double eps_max = 0;
  bool is_gne = false;
  bool reliable = true;  // false when some per-player solve gave only a bound
  FeasibilityReport feas;
  std::string message;
};

GneReport verify_gne(const GneppInstance& inst, const Eigen::VectorXd& x,
                     double eps_threshold = 1e-6, const PopOptions& pop = {});

}  // namespace gnepp
