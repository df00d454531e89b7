#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gnepp/certifier.hpp"
#include "gnepp/gauss_seidel.hpp"
#include "gnepp/instance.hpp"
#include "gnepp/pop.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace gnepp;

std::string point4(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  char buf[32];
  for (int i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f", x[i]);
    os << (i ? ", " : "") << buf;
  }
  os << ")";
  return os.str();
}

std::string csv_full(const Eigen::VectorXd& x) {
  std::ostringstream os;
  char buf[40];
  for (int i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    os << (i ? "," : "") << buf;
  }
  return os.str();
}

Eigen::VectorXd parse_csv(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    vals.push_back(std::stod(tok, &pos));
  }
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

struct Loaded {
  GneppInstance inst;
  Eigen::VectorXd start;
  double tau0 = 0.1;
  TauRule rule = TauRule::Adaptive;
};

Loaded load(const std::string& file, const std::string& builtin_name, double add_ball) {
  Loaded L;
  if (!builtin_name.empty()) {
    BuiltinEntry e = builtin(builtin_name);
    L.inst = e.instance;
    L.start = e.start;
    L.tau0 = e.tau0;
    L.rule = e.adaptive_tau ? TauRule::Adaptive : TauRule::Fixed;
  } else if (!file.empty()) {
    L.inst = load_instance(file);
    L.start = Eigen::VectorXd::Zero(L.inst.layout->total_dim());
  } else {
    throw InputError("provide an instance file or --builtin NAME");
  }
  if (add_ball > 0) {
    for (int i = 1; i <= L.inst.num_players(); ++i) {
      Polynomial b = Polynomial::constant(L.inst.layout, add_ball);
      for (int j = 1; j <= L.inst.layout->dim(i); ++j) {
        Polynomial v = Polynomial::variable(L.inst.layout, i, j);
        b -= v * v;
      }
      L.inst.players[i - 1].constraints.push_back({b, Relation::Geq});
    }
  }
  return L;
}

TauRule parse_rule(const std::string& s) {
  if (s == "fixed") return TauRule::Fixed;
  if (s == "adaptive") return TauRule::Adaptive;
  if (s == "zero") return TauRule::Zero;
  throw InputError("unknown tau rule '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss-Seidel solver for generalized Nash equilibrium problems of polynomials"};
  app.require_subcommand(1);

  std::string file, builtin_name, tau_rule = "adaptive", x0_csv, dims_csv = "2,2,2",
                                  constraint_kind = "simplex";
  double tau0 = 0.1, conv_tol = 1e-8, gne_tol = 1e-6, rank_tol = 1e-6, add_ball = 0,
         cert_tol = 1e-6;
  int max_iter = 200, order_max = -1, cert_degree = -1, players = 3, deg = 3, count = 20;
  unsigned seed = 1;
  bool verbose = false;

  auto add_common = [&](CLI::App* c, bool with_solver_flags) {
    c->add_option("file", file, "instance file");
    c->add_option("--builtin", builtin_name, "built-in instance name");
    c->add_option("--add-ball", add_ball, "append R - |x_i|^2 >= 0 to every player");
    c->add_option("--order-max", order_max, "relaxation order cap (default d0+3)");
    c->add_option("--rank-tol", rank_tol, "numerical rank tolerance");
    c->add_option("--seed", seed, "random seed");
    c->add_flag("--verbose", verbose, "trace internals");
    if (with_solver_flags) {
      c->add_option("--tau0", tau0, "initial proximal weight");
      c->add_option("--tau-rule", tau_rule, "fixed|adaptive|zero");
      c->add_option("--max-iter", max_iter, "sweep limit");
      c->add_option("--conv-tol", conv_tol, "convergence window threshold");
      c->add_option("--gne-tol", gne_tol, "verification accuracy epsilon");
      c->add_option("--x0", x0_csv, "starting point, comma separated");
    }
  };

  CLI::App* solve = app.add_subcommand("solve", "run the Gauss-Seidel iteration and verify");
  add_common(solve, true);
  CLI::App* verify = app.add_subcommand("verify", "verify a candidate point");
  add_common(verify, true);
  std::string point_csv;
  verify->add_option("--point", point_csv, "candidate point, comma separated")->required();
  CLI::App* certify_cmd = app.add_subcommand("certify", "search for a potential-game certificate");
  add_common(certify_cmd, false);
  certify_cmd->add_option("--cert-degree", cert_degree, "certificate half-degree d");
  certify_cmd->add_option("--cert-tol", cert_tol, "identity residual tolerance");
  CLI::App* pop_cmd = app.add_subcommand("pop", "globally minimize player 1's polynomial");
  add_common(pop_cmd, false);
  CLI::App* bench = app.add_subcommand("bench", "random-instance benchmark");
  bench->add_option("--players", players, "number of players");
  bench->add_option("--dims", dims_csv, "per-player dimensions, comma separated");
  bench->add_option("--deg", deg, "objective degree");
  bench->add_option("--constraint", constraint_kind, "simplex|ball");
  bench->add_option("--count", count, "number of instances");
  bench->add_option("--seed", seed, "base seed");
  bench->add_option("--max-iter", max_iter, "sweep limit");

  CLI11_PARSE(app, argc, argv);

  try {
    PopOptions pop_opts;
    pop_opts.rank_tol = rank_tol;
    pop_opts.seed = seed;
    if (order_max > 0) pop_opts.d_max = order_max;

    if (solve->parsed() || verify->parsed()) {
      Loaded L = load(file, builtin_name, add_ball);
      CLI::App* sub = solve->parsed() ? solve : verify;
      if (sub->count("--tau0")) L.tau0 = tau0;
      if (sub->count("--tau-rule")) L.rule = parse_rule(tau_rule);
      if (!x0_csv.empty()) L.start = parse_csv(x0_csv);

      if (verify->parsed()) {
        Eigen::VectorXd x = parse_csv(point_csv);
        if (x.size() != L.inst.layout->total_dim()) throw InputError("point dimension mismatch");
        GneReport rep = verify_gne(L.inst, x, gne_tol, pop_opts);
        if (!rep.message.empty()) std::cout << rep.message;
        std::cout << "instance: " << L.inst.name << "\npoint: " << point4(x) << "\n";
        for (size_t i = 0; i < rep.eps.size(); ++i)
          std::printf("player %zu: f* = %.10g  gap = %.3e\n", i + 1, rep.fstar[i], rep.eps[i]);
        std::cout << (rep.is_gne ? "verdict: GNE verified" : "verdict: NOT a GNE") << "\n";
        std::printf("verified=%d\neps=%.17g\nx=%s\n", rep.is_gne ? 1 : 0, rep.eps_max,
                    csv_full(x).c_str());
        return rep.is_gne ? 0 : 1;
      }

      GsConfig cfg;
      cfg.tau0 = L.tau0;
      cfg.rule = L.rule;
      cfg.max_iter = max_iter;
      cfg.conv_tol = conv_tol;
      cfg.pop = pop_opts;
      cfg.verbose = verbose;
      GsTrace tr = gs_solve(L.inst, L.start, cfg);
      if (!tr.message.empty()) std::cout << tr.message;
      std::cout << "instance: " << L.inst.name << " (" << L.inst.num_players()
                << " players)\n";
      std::cout << "status: " << to_string(tr.status);
      if (tr.status == GsStatus::CycleDetected) std::cout << " period=" << tr.cycle_period;
      if (tr.status == GsStatus::SubproblemInfeasible || tr.status == GsStatus::SubproblemFailed)
        std::cout << " at k=" << tr.fail_iter << " i=" << tr.fail_player;
      std::cout << "  iterations=" << tr.iterations() << "\n";
      if (tr.status == GsStatus::CycleDetected) {
        std::cout << "cycle:";
        for (const auto& st : tr.cycle_states) std::cout << " " << point4(st);
        std::cout << "\n";
      }
      std::cout << "point: " << point4(tr.x()) << "\n";

      int code;
      double eps_max = std::numeric_limits<double>::quiet_NaN();
      int verified = 0;
      if (tr.status == GsStatus::SubproblemInfeasible) {
        code = 2;
      } else if (tr.status == GsStatus::Converged || tr.status == GsStatus::MaxIterReached) {
        GneReport rep = verify_gne(L.inst, tr.x(), gne_tol, pop_opts);
        if (!rep.message.empty()) std::cout << rep.message;
        for (size_t i = 0; i < rep.eps.size(); ++i)
          std::printf("player %zu: f* = %.10g  gap = %.3e\n", i + 1, rep.fstar[i], rep.eps[i]);
        std::cout << (rep.is_gne ? "verdict: GNE verified" : "verdict: NOT a GNE") << "\n";
        eps_max = rep.eps_max;
        verified = rep.is_gne ? 1 : 0;
        code = (tr.status == GsStatus::Converged && rep.is_gne) ? 0 : 1;
      } else {
        code = 1;
      }
      std::printf("status=%s\niters=%d\ntau_final=%.17g\n", to_string(tr.status).c_str(),
                  tr.iterations(), tr.tau_history.back());
      if (tr.status == GsStatus::CycleDetected) std::printf("period=%d\n", tr.cycle_period);
      if (tr.fail_iter >= 0)
        std::printf("fail_iter=%d\nfail_player=%d\n", tr.fail_iter, tr.fail_player);
      std::printf("x=%s\n", csv_full(tr.x()).c_str());
      if (std::isfinite(eps_max)) std::printf("eps=%.17g\n", eps_max);
      std::printf("verified=%d\n", verified);
      return code;
    }

    if (certify_cmd->parsed()) {
      Loaded L = load(file, builtin_name, add_ball);
      CertifyOptions co;
      co.degree = cert_degree;
      co.cert_tol = cert_tol;
      co.verbose = verbose;
      CertifyResult cr = certify(L.inst, co);
      if (!cr.message.empty()) std::cout << cr.message;
      std::cout << "instance: " << L.inst.name << "\n";
      if (cr.certified) {
        std::cout << "potential P (6 decimal digits):\n  ";
        bool firstterm = true;
        for (const auto& [mono, coef] : cr.cert.P.terms()) {
          if (std::abs(coef) < 5e-7) continue;
          std::printf("%s%.6f*%s", firstterm ? "" : " + ", coef, mono.str().c_str());
          firstterm = false;
        }
        if (firstterm) std::printf("0");
        std::printf("\n");
        double worst = 0;
        for (double r : cr.cert.identity_residual) worst = std::max(worst, r);
        std::printf("identity residual: %.3e\nmin Gram eigenvalue: %.3e\n", worst,
                    cr.cert.min_gram_eig);
        std::printf("certified=1\ndegree=%d\nresidual=%.17g\n", cr.degree_used, worst);
      } else {
        std::cout << "not certified (sdp " << to_string(cr.sdp_status) << ")\n";
        std::printf("certified=0\ndegree=%d\n", cr.degree_used);
      }
      return cr.certified ? 0 : 1;
    }

    if (pop_cmd->parsed()) {
      Loaded L = load(file, builtin_name, add_ball);
      const PlayerProblem& pl = L.inst.players.at(0);
      PopResult pr = pop_minimize(pl.objective, pl.constraints, 1, pop_opts);
      std::cout << "status: " << to_string(pr.status) << "  order=" << pr.order << "\n";
      if (std::isfinite(pr.bound)) std::printf("bound: %.10g\n", pr.bound);
      for (const auto& u : pr.minimizers) std::cout << "minimizer: " << point4(u) << "\n";
      std::printf("status=%s\nbound=%.17g\norder=%d\nrank=%d\nlevel=%d\n",
                  to_string(pr.status).c_str(), pr.bound, pr.order, pr.rank, pr.level);
      for (const auto& u : pr.minimizers) std::printf("minimizer=%s\n", csv_full(u).c_str());
      if (pr.status == PopStatus::Infeasible) return 2;
      return pr.status == PopStatus::MinimizersExtracted ? 0 : 1;
    }

    if (bench->parsed()) {
      std::vector<int> dims;
      {
        Eigen::VectorXd dv = parse_csv(dims_csv);
        for (int i = 0; i < dv.size(); ++i) dims.push_back(static_cast<int>(dv[i]));
      }
      if (static_cast<int>(dims.size()) != players)
        throw InputError("--dims must list one dimension per player");
      JointConstraint kind;
      if (constraint_kind == "simplex")
        kind = JointConstraint::Simplex;
      else if (constraint_kind == "ball")
        kind = JointConstraint::Ball;
      else
        throw InputError("unknown constraint kind '" + constraint_kind + "'");

      std::vector<std::string> lines(count);
      std::vector<int> ok(count, 0);
      std::vector<double> secs(count, 0), iters(count, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (int idx = 0; idx < count; ++idx) {
        GneppInstance inst = random_instance(players, dims, deg, kind, seed + idx);
        Eigen::VectorXd x0 = random_instance_start(inst, kind);
        GsConfig cfg;
        cfg.tau0 = 0.1;
        cfg.rule = TauRule::Adaptive;
        cfg.max_iter = max_iter;
        GsTrace tr = gs_solve(inst, x0, cfg);
        bool success = false;
        double eps = std::numeric_limits<double>::quiet_NaN();
        // success = the returned iterate is a GNE at 1e-6, whether or not the
        // iterate window closed before the loop cap
        if (tr.status == GsStatus::Converged || tr.status == GsStatus::MaxIterReached) {
          GneReport rep = verify_gne(inst, tr.x(), 1e-6);
          eps = rep.eps_max;
          success = rep.is_gne;
        }
        char buf[256];
        std::snprintf(buf, sizeof buf, "seed=%u status=%s iters=%d eps=%.3e success=%d",
                      seed + idx, to_string(tr.status).c_str(), tr.iterations(), eps,
                      success ? 1 : 0);
        lines[idx] = buf;
        ok[idx] = success ? 1 : 0;
        secs[idx] = tr.wall_seconds;
        iters[idx] = tr.iterations();
      }
      int nok = 0;
      double tsum = 0, isum = 0;
      for (int idx = 0; idx < count; ++idx) {
        std::cout << lines[idx] << "\n";
        nok += ok[idx];
        tsum += secs[idx];
        isum += iters[idx];
      }
      if (count > 0)
        std::printf("success=%d/%d\nrate=%.1f\navg_iters=%.1f\navg_seconds=%.3f\n", nok, count,
                    100.0 * nok / count, isum / count, tsum / count);
      else
        std::printf("success=0/0\nrate=0.0\n");
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
