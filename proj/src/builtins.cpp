#include <functional>
#include <map>

#include "gnepp/instance.hpp"

namespace gnepp {

namespace {

using Maker = std::function<BuiltinEntry()>;

struct Ctx {
  LayoutPtr layout;
  Polynomial x(int b, int j) const { return Polynomial::variable(layout, b, j); }
  Polynomial c(double v) const { return Polynomial::constant(layout, v); }
};

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double d : vals) v[i++] = d;
  return v;
}

// Two-player introductory game: min x1 | min (x2)^2 - (x1-1)x2.
BuiltinEntry make_intro() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "intro-1.4";
  inst.layout = q.layout;
  PlayerProblem p1, p2;
  p1.objective = q.x(1, 1);
  p1.constraints.push_back({q.x(2, 1) * (q.x(1, 1) - q.x(2, 1) - q.c(1)), Relation::Geq});
  p1.constraints.push_back({q.x(1, 1), Relation::Geq});
  p2.objective = q.x(2, 1) * q.x(2, 1) - (q.x(1, 1) - q.c(1)) * q.x(2, 1);
  p2.constraints.push_back({q.c(3) - q.x(1, 1) * q.x(1, 1) - q.x(2, 1) * q.x(2, 1), Relation::Geq});
  p2.constraints.push_back({q.x(2, 1), Relation::Geq});
  inst.players = {p1, p2};
  return {inst, vec({0, 0}), 0.02, false};
}

// Same game started where the iterates converge to the non-equilibrium (1,0).
BuiltinEntry make_limit() {
  BuiltinEntry e = make_intro();
  e.instance.name = "ex3.3-limit";
  e.start = vec({1.5, 0.5});
  return e;
}

// Feasible start, but the second player's subproblem goes infeasible at k=1.
BuiltinEntry make_infeasible() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "ex3.1";
  inst.layout = q.layout;
  PlayerProblem p1, p2;
  p1.objective = -q.x(1, 1) - q.x(2, 1);
  p1.constraints.push_back({q.x(1, 1), Relation::Geq});
  p1.constraints.push_back({q.c(2) - q.x(1, 1), Relation::Geq});
  p2.objective = q.x(1, 1) * q.x(2, 1);
  p2.constraints.push_back({q.c(1) - q.x(1, 1) - q.x(2, 1) * q.x(2, 1), Relation::Geq});
  inst.players = {p1, p2};
  return {inst, vec({0, 1}), 0.05, false};
}

// Gauss-Seidel alternates in a 4-cycle on this one.
BuiltinEntry make_cycle() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "ex3.2-cycle";
  inst.layout = q.layout;
  PlayerProblem p1, p2;
  p1.objective = q.x(1, 1);
  p1.constraints.push_back({q.x(1, 1) - q.x(2, 1), Relation::Geq});
  p2.objective = q.x(1, 1) * q.x(2, 1);
  p2.constraints.push_back({q.x(1, 1) * q.x(1, 1) + q.x(2, 1) * q.x(2, 1) - q.c(2), Relation::Eq});
  inst.players = {p1, p2};
  return {inst, vec({1, 1}), 0.001, false};
}

// Environmental pollution control, N=2, coords (x_{i,0}, x_{i,1}, x_{i,2}).
BuiltinEntry make_pollution() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{3, 3})};
  const double b[2] = {2, 2}, E[2] = {1, 1};
  const double gamma[2][2] = {{0.7, 0.9}, {0.8, 0.8}};  // gamma[i-1][j-1]
  auto x = [&](int i, int j) { return q.x(i, j + 1); };  // x_{i,j}, j = 0..2

  GneppInstance inst;
  inst.name = "pollution";
  inst.layout = q.layout;
  Polynomial net[2];
  for (int k = 1; k <= 2; ++k) {
    net[k - 1] = x(k, 0);
    for (int j = 1; j <= 2; ++j) net[k - 1] -= x(j, k).scaled(gamma[j - 1][k - 1]);
  }
  for (int i = 1; i <= 2; ++i) {
    PlayerProblem pl;
    Polynomial damage = net[i - 1] + (net[0] * net[1]).scaled(2.0);
    pl.objective = -(x(i, 0) * (q.c(b[i - 1]) - x(i, 0).scaled(0.5))) + x(i, 1) + x(i, 2) + damage;
    for (int j = 0; j <= 2; ++j) pl.constraints.push_back({x(i, j), Relation::Geq});
    Polynomial accounted = x(i, 0);
    for (int j = 1; j <= 2; ++j) accounted -= x(i, j).scaled(gamma[i - 1][j - 1]);
    pl.constraints.push_back({q.c(E[i - 1]) - accounted, Relation::Geq});
    for (int k = 0; k < 2; ++k) pl.constraints.push_back({net[k], Relation::Geq});
    inst.players.push_back(std::move(pl));
  }
  return {inst, Eigen::VectorXd::Constant(6, 0.5), 0.1, true};
}

// GPG with X = {1 <= x1, x2 <= 10, x1 >= x2}.
BuiltinEntry make_52i() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "ex5.2i";
  inst.layout = q.layout;
  std::vector<Constraint> shared = {
      {q.x(1, 1) - q.c(1), Relation::Geq}, {q.c(10) - q.x(1, 1), Relation::Geq},
      {q.x(2, 1) - q.c(1), Relation::Geq}, {q.c(10) - q.x(2, 1), Relation::Geq},
      {q.x(1, 1) - q.x(2, 1), Relation::Geq}};
  PlayerProblem p1, p2;
  p1.objective = q.x(1, 1) + q.x(2, 1);
  p1.constraints = shared;
  p2.objective = -q.x(1, 1) * q.x(2, 1);
  p2.constraints = shared;
  inst.players = {p1, p2};
  return {inst, vec({3, 2}), 0.02, false};
}

// GPG with X = {x1^3 + x2^3 <= 2, x1 >= 6 x2}.
BuiltinEntry make_52ii() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "ex5.2ii";
  inst.layout = q.layout;
  auto x1 = q.x(1, 1), x2 = q.x(2, 1);
  std::vector<Constraint> shared = {{q.c(2) - x1.pow(3) - x2.pow(3), Relation::Geq},
                                    {x1 - x2.scaled(6.0), Relation::Geq}};
  PlayerProblem p1, p2;
  p1.objective = x1 * x1 * x2 + x2 * x2 * x1 - x1.pow(4).scaled(4.0);
  p1.constraints = shared;
  p1.constraints.push_back({x1, Relation::Geq});
  p2.objective = x1 * x2 - (x2 * x2).scaled(3.0);
  p2.constraints = shared;
  p2.constraints.push_back({x2 - q.c(0.125), Relation::Geq});
  inst.players = {p1, p2};
  return {inst, vec({1, 0.125}), 0.02, false};
}

// GPG with the band constraint |x_{1,1}+x_{1,2} - x_2| <= 0.3.
BuiltinEntry make_52iii() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 1})};
  GneppInstance inst;
  inst.name = "ex5.2iii";
  inst.layout = q.layout;
  auto a = q.x(1, 1), b = q.x(1, 2), x2 = q.x(2, 1);
  std::vector<Constraint> shared = {
      {a - q.c(0.5), Relation::Geq},
      {b - q.c(0.5), Relation::Geq},
      {x2 - q.c(0.5), Relation::Geq},
      {a + b - x2 + q.c(0.3), Relation::Geq},
      {x2 + q.c(0.3) - a - b, Relation::Geq}};
  PlayerProblem p1, p2;
  p1.objective = a * x2 + b * x2;
  p1.constraints = shared;
  // the reported equilibrium sits on |x_1|^2 = 2
  p1.constraints.push_back({a * a + b * b - q.c(2), Relation::Eq});
  p2.objective = a * b * x2;
  p2.constraints = shared;
  inst.players = {p1, p2};
  return {inst, vec({1, 1, 2}), 0.02, false};
}

// Disk-constrained game; also the certifier's worked example.
BuiltinEntry make_52iv() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1})};
  GneppInstance inst;
  inst.name = "ex5.2iv";
  inst.layout = q.layout;
  auto x1 = q.x(1, 1), x2 = q.x(2, 1);
  Polynomial ball = q.c(1) - x1 * x1 - x2 * x2;
  PlayerProblem p1, p2;
  p1.objective = x2.scaled(2.0) - x1;
  p1.constraints = {{ball, Relation::Geq}, {x1, Relation::Geq}};
  p2.objective = x1 * x1 - (x1 * x2).scaled(2.0) - x2 * x2;
  p2.constraints = {{ball, Relation::Geq}, {x2, Relation::Geq}};
  inst.players = {p1, p2};
  return {inst, vec({0.2, 0.3}), 0.02, false};
}

// Simplex-coupled quadratic game, equilibrium (0, 0.5, 0, 0.5).
BuiltinEntry make_53() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 2})};
  GneppInstance inst;
  inst.name = "ex5.3";
  inst.layout = q.layout;
  auto x11 = q.x(1, 1), x12 = q.x(1, 2), x21 = q.x(2, 1), x22 = q.x(2, 2);
  Polynomial simplex = x11 + x12 + x21 + x22 - q.c(1);
  PlayerProblem p1, p2;
  p1.objective = x11 * (x12 + x21.scaled(2.0) + x22.scaled(2.0)) + x12 * (x21 + x22) +
                 (x21 * x22).scaled(2.0);
  p1.constraints = {{simplex, Relation::Eq}, {x11, Relation::Geq}, {x12, Relation::Geq}};
  p2.objective = x11 * x11 + x12 * x12 - x21 * x21 - x22 * x22;
  p2.constraints = {{simplex, Relation::Eq}, {x21, Relation::Geq}, {x22, Relation::Geq}};
  inst.players = {p1, p2};
  return {inst, vec({0.2, 0.3, 0.2, 0.3}), 0.02, false};
}

// Simplex game with lower bounds 0.1, equilibrium (0.1, 0.4, 0.1, 0.4).
BuiltinEntry make_54() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 2})};
  GneppInstance inst;
  inst.name = "ex5.4";
  inst.layout = q.layout;
  auto x11 = q.x(1, 1), x12 = q.x(1, 2), x21 = q.x(2, 1), x22 = q.x(2, 2);
  Polynomial simplex = x11 + x12 + x21 + x22 - q.c(1);
  PlayerProblem p1, p2;
  p1.objective = (x12 * x12).scaled(-2.0) + x21 * x12 + x11 * x21;
  p1.constraints = {{simplex, Relation::Eq},
                    {x11 - q.c(0.1), Relation::Geq},
                    {x12 - q.c(0.1), Relation::Geq}};
  p2.objective = x21 * x21 - (x12 * x22).scaled(2.0) - (x11 * x22).scaled(2.0) + x22 * x22;
  p2.constraints = {{simplex, Relation::Eq},
                    {x21 - q.c(0.1), Relation::Geq},
                    {x22 - q.c(0.1), Relation::Geq}};
  inst.players = {p1, p2};
  return {inst, vec({0.25, 0.25, 0.25, 0.25}), 0.1, true};
}

// Joint-ball game with box side constraints, equilibrium (0, -0.5, 0, 0.3).
BuiltinEntry make_55() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 2})};
  GneppInstance inst;
  inst.name = "ex5.5";
  inst.layout = q.layout;
  auto x11 = q.x(1, 1), x12 = q.x(1, 2), x21 = q.x(2, 1), x22 = q.x(2, 2);
  Polynomial ball = q.c(1) - x11 * x11 - x12 * x12 - x21 * x21 - x22 * x22;
  PlayerProblem p1, p2;
  p1.objective = x11 * x11 + x12 * x12 + x11 + x12;
  p1.constraints = {{ball, Relation::Geq},
                    {x11, Relation::Geq},
                    {q.c(0.5) - x12, Relation::Geq}};
  p2.objective = x22 * x22 - x21 * x22;
  p2.constraints = {{ball, Relation::Geq},
                    {-x21, Relation::Geq},
                    {x22 - q.c(0.3), Relation::Geq},
                    {q.c(0.8) - x22, Relation::Geq}};
  inst.players = {p1, p2};
  return {inst, vec({0.5, 0.5, -0.6, 0.6}), 0.1, true};
}

// Three-player consensus game; needs tau > 0 to settle.
BuiltinEntry make_56() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{1, 1, 1})};
  GneppInstance inst;
  inst.name = "ex5.6";
  inst.layout = q.layout;
  auto x1 = q.x(1, 1), x2 = q.x(2, 1), x3 = q.x(3, 1);
  PlayerProblem p1, p2, p3;
  p1.objective = (x1 - x2) * (x1 - x2);
  p1.constraints = {{q.c(10) - x1 * x1 - x2 * x2 - x3 * x3, Relation::Geq}};
  p2.objective = (x2 - x3) * (x2 - x3);
  p2.constraints = {{q.c(3) - x2, Relation::Geq}};
  p3.objective = (x3 - x1) * (x3 - x1);
  p3.constraints = {{q.c(6) - x1 - x2 - x3, Relation::Geq}};
  inst.players = {p1, p2, p3};
  return {inst, vec({0, 1, 2}), 0.1, false};
}

// Nonconvex objectives and a nonconvex feasible set for player 2.
BuiltinEntry make_58() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 2})};
  GneppInstance inst;
  inst.name = "ex5.8";
  inst.layout = q.layout;
  auto x11 = q.x(1, 1), x12 = q.x(1, 2), x21 = q.x(2, 1), x22 = q.x(2, 2);
  PlayerProblem p1, p2;
  p1.objective = x11.pow(3) + x12 * x21 + x11 * x12 * x22;
  p1.constraints = {{q.c(1) - x11 * x11 - x12 * x12, Relation::Geq}};
  p2.objective = -x21.pow(4) + x11 * x22 * x22;
  p2.constraints = {{x21 * x21 + x22 * x22 - x11, Relation::Geq},
                    {q.c(1) - x21 * x21 - x22 * x22, Relation::Geq}};
  inst.players = {p1, p2};
  return {inst, vec({0.5, 0.5, 0.6, 0.6}), 0.02, false};
}

// Internet switching with the lifting y_i; block i is (x_i, y_i).
BuiltinEntry make_internet(const std::string& name, int variant) {
  const int N = 10;
  const double B = 1.0;
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>(N, 2))};
  GneppInstance inst;
  inst.name = name;
  inst.layout = q.layout;
  Polynomial total(q.layout);
  for (int j = 1; j <= N; ++j) total += q.x(j, 1);
  for (int i = 1; i <= N; ++i) {
    auto xi = q.x(i, 1), yi = q.x(i, 2);
    PlayerProblem pl;
    pl.objective = -(xi * yi * (q.c(1) - total.scaled(1.0 / B)));
    if (variant == 2) pl.objective = -pl.objective;  // negated utility
    if (variant >= 1 && i == 1) {
      pl.constraints.push_back({xi - q.c(0.3), Relation::Geq});
      pl.constraints.push_back({q.c(0.5) - xi, Relation::Geq});
    } else {
      pl.constraints.push_back({xi - (variant >= 1 ? q.c(0.001) : q.c(0)), Relation::Geq});
      pl.constraints.push_back({q.c(B) - total, Relation::Geq});
    }
    pl.constraints.push_back({total * yi - q.c(1), Relation::Eq});
    inst.players.push_back(std::move(pl));
  }
  double x1 = (variant >= 1) ? 0.3 : 0.4;
  double rest = 0.01;
  double ssum = x1 + 9 * rest;
  Eigen::VectorXd start(2 * N);
  for (int i = 0; i < N; ++i) {
    start[2 * i] = (i == 0) ? x1 : rest;
    start[2 * i + 1] = 1.0 / ssum;
  }
  return {inst, start, 0.1, true};
}

// Normalized two-player quadratic game (largest |coeff| scaled to one).
BuiltinEntry make_a17() {
  Ctx q{std::make_shared<BlockLayout>(std::vector<int>{2, 1})};
  GneppInstance inst;
  inst.name = "A17";
  inst.layout = q.layout;
  auto a = q.x(1, 1), b = q.x(1, 2), z = q.x(2, 1);
  std::vector<Constraint> shared = {
      {q.c(14) - a - b.scaled(2.0) + z, Relation::Geq},
      {q.c(30) - a.scaled(3.0) - b.scaled(2.0) - z, Relation::Geq}};
  PlayerProblem p1, p2;
  p1.objective = (a * a + a * b + b * b).scaled(1.0 / 38) + (a + b) * z -
                 a.scaled(25.0 / 38) - b;
  p1.constraints = shared;
  p1.constraints.push_back({a, Relation::Geq});
  p1.constraints.push_back({b, Relation::Geq});
  p2.objective = ((a + b) * z).scaled(1.0 / 25) + (z * z).scaled(1.0 / 25) - z;
  p2.constraints = shared;
  p2.constraints.push_back({z, Relation::Geq});
  inst.players = {p1, p2};
  return {inst, Eigen::VectorXd::Ones(3), 0.001, true};
}

const std::map<std::string, Maker>& catalog() {
  static const std::map<std::string, Maker> m = {
      {"intro-1.4", make_intro},
      {"ex3.1", make_infeasible},
      {"ex3.2-cycle", make_cycle},
      {"ex3.3-limit", make_limit},
      {"pollution", make_pollution},
      {"ex4.3", [] { auto e = make_52i(); e.instance.name = "ex4.3"; return e; }},
      {"ex4.5", [] { auto e = make_52iii(); e.instance.name = "ex4.5"; return e; }},
      {"ex4.6", [] { auto e = make_52iv(); e.instance.name = "ex4.6"; return e; }},
      {"ex5.2i", make_52i},
      {"ex5.2ii", make_52ii},
      {"ex5.2iii", make_52iii},
      {"ex5.2iv", make_52iv},
      {"ex5.3", make_53},
      {"ex5.4", make_54},
      {"ex5.5", make_55},
      {"ex5.6", make_56},
      {"ex5.8", make_58},
      {"ex5.8-nonconvex", make_58},
      {"ex5.9-internet", [] { return make_internet("ex5.9-internet", 0); }},
      {"ex5.10-A1", [] { return make_internet("ex5.10-A1", 1); }},
      {"ex5.11-minusA1", [] { return make_internet("ex5.11-minusA1", 2); }},
      {"A17", make_a17},
  };
  return m;
}

}  // namespace

BuiltinEntry builtin(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw InputError("unknown builtin '" + name + "'");
  return it->second();
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : catalog()) out.push_back(k);
  return out;
}

}  // namespace gnepp
