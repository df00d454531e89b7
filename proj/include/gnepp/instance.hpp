#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnepp/polynomial.hpp"

namespace gnepp {

enum class Relation { Geq, Eq };  // g >= 0 or g == 0, one-sided form

struct Constraint {
  Polynomial poly;
  Relation rel = Relation::Geq;
};

struct PlayerProblem {
  Polynomial objective;
  std::vector<Constraint> constraints;
};

struct GneppInstance {
  std::string name;
  LayoutPtr layout;
  std::vector<PlayerProblem> players;

  int num_players() const { return static_cast<int>(players.size()); }
};

/// Per-constraint residuals g_{i,j}(point), in player order.
struct FeasibilityReport {
  std::vector<std::vector<double>> residuals;  // [player][constraint]
  bool feasible = true;                        // at tolerance feastol
  double worst = 0.0;                          // most negative violation
};

inline constexpr double kDefaultFeasTol = 1e-8;

FeasibilityReport feasibility_residual(const GneppInstance& inst,
                                       const Eigen::VectorXd& point,
                                       double feastol = kDefaultFeasTol);

/// Parse the plain-text problem grammar. Errors carry line:col positions.
GneppInstance parse_instance(const std::string& text);
GneppInstance load_instance(const std::string& path);
std::string serialize_instance(const GneppInstance& inst);

/// Built-in catalog of the worked examples. Throws InputError for unknown
/// names. Each entry ships with its reference run configuration.
struct BuiltinEntry {
  GneppInstance instance;
  Eigen::VectorXd start;        // reference starting point
  double tau0 = 0.1;
  bool adaptive_tau = true;     // false -> fixed tau
};

BuiltinEntry builtin(const std::string& name);
std::vector<std::string> builtin_names();

enum class JointConstraint { Simplex, Ball };

/// Random GNEPP of Example-5.12 shape: dense degree-d objectives over all
/// variables (max |coeff| normalized to 1) with a joint simplex or ball.
GneppInstance random_instance(int players, const std::vector<int>& dims, int degree,
                              JointConstraint kind, std::uint64_t seed);

/// A feasible starting point for the random instances (simplex barycenter
/// or the origin for the ball).
Eigen::VectorXd random_instance_start(const GneppInstance& inst, JointConstraint kind);

}  // namespace gnepp
