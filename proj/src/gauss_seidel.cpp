#include "gnepp/gauss_seidel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gnepp {

std::string to_string(GsStatus s) {
  switch (s) {
    case GsStatus::Converged: return "Converged";
    case GsStatus::CycleDetected: return "CycleDetected";
    case GsStatus::SubproblemInfeasible: return "SubproblemInfeasible";
    case GsStatus::MaxIterReached: return "MaxIterReached";
    case GsStatus::SubproblemFailed: return "SubproblemFailed";
  }
  return "?";
}

std::string to_string(TauRule r) {
  switch (r) {
    case TauRule::Fixed: return "fixed";
    case TauRule::Adaptive: return "adaptive";
    case TauRule::Zero: return "zero";
  }
  return "?";
}

double update_tau(double tau, const Eigen::VectorXd& xnew, const Eigen::VectorXd& xold,
                  const BlockLayout& layout, TauRule rule) {
  switch (rule) {
    case TauRule::Fixed: return tau;
    case TauRule::Zero: return 0.0;
    case TauRule::Adaptive: {
      double step = 0;
      for (int i = 1; i <= layout.players(); ++i) {
        int off = layout.offset(i), n = layout.dim(i);
        step = std::max(step, (xnew.segment(off, n) - xold.segment(off, n)).norm());
      }
      return std::max(std::min(tau, step), 0.1 * tau);
    }
  }
  return tau;
}

std::optional<int> detect_cycle(const std::vector<Eigen::VectorXd>& iterates, double tol) {
  const int n = static_cast<int>(iterates.size());
  if (n < 4) return std::nullopt;
  for (int p = 1; p <= 12; ++p) {
    if (3 * p > n) break;
    bool ok = true;
    for (int m = n - 3 * p; m + p < n && ok; ++m)
      if ((iterates[m] - iterates[m + p]).cwiseAbs().maxCoeff() > tol) ok = false;
    if (ok) return p;
  }
  return std::nullopt;
}

namespace {

// squared distance of block i to a fixed center, as a polynomial
Polynomial prox_term(LayoutPtr layout, int block, const Eigen::VectorXd& center_full) {
  Polynomial p(layout);
  int off = layout->offset(block);
  for (int j = 1; j <= layout->dim(block); ++j) {
    Polynomial d = Polynomial::variable(layout, block, j) -
                   Polynomial::constant(layout, center_full[off + j - 1]);
    p += d * d;
  }
  return p;
}

}  // namespace

GsTrace gs_solve(const GneppInstance& inst, const Eigen::VectorXd& x0, const GsConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  const BlockLayout& layout = *inst.layout;
  const int N = inst.num_players();
  GsTrace tr;
  std::ostringstream msg;

  if (x0.size() != layout.total_dim()) throw InputError("starting point dimension mismatch");
  FeasibilityReport fr = feasibility_residual(inst, x0);
  if (!fr.feasible)
    msg << "warning: starting point infeasible (worst violation " << fr.worst << ")\n";
  if (cfg.tau0 <= 0 && cfg.rule != TauRule::Zero)
    throw InputError("tau0 must be positive unless the zero rule is requested");

  double tau = (cfg.rule == TauRule::Zero) ? 0.0 : cfg.tau0;
  tr.iterates.push_back(x0);
  tr.tau_history.push_back(tau);
  // states after every single player update; cycles live at this granularity
  // (a two-player flip-flop traverses four of these states per repeat)
  std::vector<Eigen::VectorXd> half_states{x0};

  auto finish = [&](GsStatus st) {
    tr.status = st;
    tr.message = msg.str();
    tr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tr;
  };

  for (int k = 0; k < cfg.max_iter; ++k) {
    const Eigen::VectorXd xk = tr.iterates.back();
    Eigen::VectorXd x = xk;
    for (int i = 1; i <= N; ++i) {
      const PlayerProblem& pl = inst.players[i - 1];
      Polynomial fi = pl.objective.restrict_to_block(i, x);
      if (tau > 0) fi += prox_term(inst.layout, i, xk).scaled(tau);
      std::vector<Constraint> cons;
      for (const auto& c : pl.constraints)
        cons.push_back({c.poly.restrict_to_block(i, x), c.rel});
      PopResult pr = pop_minimize(fi, cons, i, cfg.pop);
      if (pr.status == PopStatus::Infeasible) {
        tr.fail_iter = k + 1;
        tr.fail_player = i;
        if (i > 1) tr.iterates.push_back(x);  // keep the partial sweep for diagnosis
        msg << "subproblem of player " << i << " infeasible at iteration " << k + 1 << "\n";
        return finish(GsStatus::SubproblemInfeasible);
      }
      if (pr.status != PopStatus::MinimizersExtracted) {
        tr.fail_iter = k + 1;
        tr.fail_player = i;
        if (i > 1) tr.iterates.push_back(x);
        msg << "subproblem of player " << i << " at iteration " << k + 1
            << " not solved: " << to_string(pr.status) << " (order " << pr.order
            << ", sdp " << to_string(pr.sdp_status) << ")\n";
        return finish(GsStatus::SubproblemFailed);
      }
      int off = layout.offset(i), n = layout.dim(i);
      const Eigen::VectorXd prev = xk.segment(off, n);
      int best = 0;
      for (size_t m = 1; m < pr.minimizers.size(); ++m) {
        double dm = (pr.minimizers[m] - prev).norm();
        double db = (pr.minimizers[best] - prev).norm();
        // ties (symmetric minimizer pairs) go to the later point in the
        // sorted list, i.e. the lexicographically larger one
        if (dm < db - 1e-9 || std::abs(dm - db) <= 1e-9) best = static_cast<int>(m);
      }
      x.segment(off, n) = pr.minimizers[best];
      half_states.push_back(x);
    }
    tr.iterates.push_back(x);
    tau = update_tau(tau, x, xk, layout, cfg.rule);
    tr.tau_history.push_back(tau);
    if (cfg.verbose) {
      std::fprintf(stderr, "gs k=%d tau=%.3g x =", k + 1, tau);
      for (int j = 0; j < x.size(); ++j) std::fprintf(stderr, " % .6f", x[j]);
      std::fprintf(stderr, "\n");
    }

    // convergence window
    if (static_cast<int>(tr.iterates.size()) >= cfg.conv_window) {
      bool conv = true;
      int s = static_cast<int>(tr.iterates.size()) - cfg.conv_window;
      for (int a = s; a < static_cast<int>(tr.iterates.size()) && conv; ++a)
        for (int b = a + 1; b < static_cast<int>(tr.iterates.size()) && conv; ++b)
          if ((tr.iterates[a] - tr.iterates[b]).cwiseAbs().maxCoeff() > cfg.conv_tol)
            conv = false;
      if (conv) return finish(GsStatus::Converged);
    }

    // cycle check: genuine oscillation only (period >= 2, visible amplitude)
    if (auto p = detect_cycle(half_states)) {
      if (*p >= 2) {
        double amp = 0;
        size_t s = half_states.size() - 3 * (*p);
        for (size_t a = s; a < half_states.size(); ++a)
          for (size_t b = a + 1; b < half_states.size(); ++b)
            amp = std::max(amp, (half_states[a] - half_states[b]).cwiseAbs().maxCoeff());
        if (amp >= 1e-4) {
          tr.cycle_period = *p;
          tr.cycle_states.assign(half_states.end() - *p, half_states.end());
          return finish(GsStatus::CycleDetected);
        }
      }
    }
  }
  return finish(GsStatus::MaxIterReached);
}

GneReport verify_gne(const GneppInstance& inst, const Eigen::VectorXd& x, double eps_threshold,
                     const PopOptions& pop) {
  GneReport rep;
  rep.feas = feasibility_residual(inst, x);
  std::ostringstream msg;
  const int N = inst.num_players();
  bool all_ok = rep.feas.feasible;
  if (!rep.feas.feasible)
    msg << "candidate infeasible (worst violation " << rep.feas.worst << ")\n";
  for (int i = 1; i <= N; ++i) {
    const PlayerProblem& pl = inst.players[i - 1];
    Polynomial fi = pl.objective.restrict_to_block(i, x);
    std::vector<Constraint> cons;
    for (const auto& c : pl.constraints)
      cons.push_back({c.poly.restrict_to_block(i, x), c.rel});
    PopResult pr = pop_minimize(fi, cons, i, pop);
    double fx = pl.objective.eval(x);
    double fstar = pr.bound;
    if (pr.status == PopStatus::Infeasible) {
      msg << "player " << i << ": subproblem reported infeasible\n";
      rep.reliable = false;
      fstar = fx;
    } else if (pr.status != PopStatus::MinimizersExtracted) {
      msg << "player " << i << ": only a bound available (" << to_string(pr.status) << ")\n";
      if (!std::isfinite(fstar)) rep.reliable = false;
    }
    double eps = fx - fstar;
    rep.fstar.push_back(fstar);
    rep.eps.push_back(eps);
    rep.eps_max = std::max(rep.eps_max, eps);
    if (!(eps <= eps_threshold)) all_ok = false;
  }
  rep.is_gne = all_ok;
  rep.message = msg.str();
  return rep;
}

}  // namespace gnepp
