#include "gnepp/instance.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gnepp {

FeasibilityReport feasibility_residual(const GneppInstance& inst,
                                       const Eigen::VectorXd& point, double feastol) {
  if (point.size() != inst.layout->total_dim())
    throw InputError("point dimension does not match instance");
  FeasibilityReport rep;
  for (const auto& pl : inst.players) {
    std::vector<double> vals;
    for (const auto& c : pl.constraints) {
      double v = c.poly.eval(point);
      vals.push_back(v);
      double viol = (c.rel == Relation::Eq) ? std::abs(v) : -v;
      if (viol > feastol) rep.feasible = false;
      rep.worst = std::max(rep.worst, viol);
    }
    rep.residuals.push_back(std::move(vals));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Lexer / parser for the problem grammar
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Word, Number, Var, Op, End } kind = End;
  std::string text;
  double value = 0;
  int block = 0, coord = 0;
  int line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::ostringstream os;
    os << "parse error at " << t.line << ":" << t.col << ": " << msg;
    if (!t.text.empty()) os << " (got '" << t.text << "')";
    throw InputError(os.str());
  }

 private:
  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      lex_word();
    } else {
      static const std::string ops = "+-*^()=<>:";
      if (ops.find(c) == std::string::npos)
        fail(tok_, std::string("unexpected character '") + c + "'");
      tok_.kind = Token::Op;
      // two-character relations
      if ((c == '>' || c == '<' || c == '=') && pos_ + 1 < text_.size() &&
          text_[pos_ + 1] == '=') {
        tok_.text = text_.substr(pos_, 2);
        take(2);
      } else {
        tok_.text = std::string(1, c);
        take(1);
      }
    }
  }

  void lex_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      take(1);
    // exponent part
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      take(1);
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) take(1);
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          take(1);
      } else {
        pos_ = save;  // not an exponent
      }
    }
    tok_.kind = Token::Number;
    tok_.text = text_.substr(start, pos_ - start);
    try {
      tok_.value = std::stod(tok_.text);
    } catch (...) {
      fail(tok_, "malformed number");
    }
  }

  void lex_word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      take(1);
    tok_.text = text_.substr(start, pos_ - start);
    // variable token x<i>_<j>
    if (tok_.text.size() >= 2 && tok_.text[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(tok_.text[1]))) {
      std::size_t us = tok_.text.find('_');
      if (us != std::string::npos) {
        std::string bi = tok_.text.substr(1, us - 1);
        std::string cj = tok_.text.substr(us + 1);
        bool ok = !bi.empty() && !cj.empty();
        for (char ch : bi + cj)
          if (!std::isdigit(static_cast<unsigned char>(ch))) ok = false;
        if (!ok) fail(tok_, "malformed variable token");
        tok_.kind = Token::Var;
        tok_.block = std::stoi(bi);
        tok_.coord = std::stoi(cj);
        return;
      }
      // block name x<i> used after the `block` keyword
    }
    if (tok_.text.find('_') != std::string::npos) fail(tok_, "malformed token");
    tok_.kind = Token::Word;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') take(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take(1);
      } else {
        break;
      }
    }
  }

  void take(std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  GneppInstance parse() {
    GneppInstance inst;
    expect_word("players");
    int n = expect_int("player count");
    if (n < 1) lex_.fail(lex_.peek(), "player count must be >= 1");

    std::vector<int> dims(n, 0);
    while (lex_.peek().kind == Token::Word && lex_.peek().text == "block") {
      lex_.next();
      Token name = lex_.next();
      int idx = block_index(name);
      int d = expect_int("block dimension");
      if (idx < 1 || idx > n) lex_.fail(name, "block index out of range");
      if (dims[idx - 1] != 0) lex_.fail(name, "duplicate block");
      if (d < 1) lex_.fail(name, "block dimension must be >= 1");
      dims[idx - 1] = d;
    }
    for (int i = 0; i < n; ++i)
      if (dims[i] == 0) throw InputError("missing block for player " + std::to_string(i + 1));
    layout_ = std::make_shared<BlockLayout>(dims);
    inst.layout = layout_;
    inst.players.resize(n);

    std::vector<bool> seen(n, false);
    while (lex_.peek().kind != Token::End) {
      Token pw = lex_.next();
      if (pw.kind != Token::Word || pw.text != "player") lex_.fail(pw, "expected 'player'");
      int idx = expect_int("player index");
      if (idx < 1 || idx > n) lex_.fail(pw, "player index out of range");
      if (seen[idx - 1]) lex_.fail(pw, "duplicate player section");
      seen[idx - 1] = true;

      expect_word("objective");
      expect_op(":");
      inst.players[idx - 1].objective = parse_expr();

      while (lex_.peek().kind == Token::Word && lex_.peek().text == "constraint") {
        lex_.next();
        expect_op(":");
        Polynomial lhs = parse_expr();
        Token rel = lex_.next();
        if (rel.kind != Token::Op || (rel.text != ">=" && rel.text != "<=" && rel.text != "=="))
          lex_.fail(rel, "expected relation >=, <= or ==");
        Polynomial rhs = parse_expr();
        Constraint c;
        if (rel.text == "<=") {
          c.poly = rhs - lhs;
          c.rel = Relation::Geq;
        } else {
          c.poly = lhs - rhs;
          c.rel = (rel.text == "==") ? Relation::Eq : Relation::Geq;
        }
        inst.players[idx - 1].constraints.push_back(std::move(c));
      }
    }
    for (int i = 0; i < n; ++i)
      if (!seen[i]) throw InputError("missing section for player " + std::to_string(i + 1));
    return inst;
  }

 private:
  int block_index(const Token& name) {
    if (name.kind != Token::Word || name.text.size() < 2 || name.text[0] != 'x')
      lex_.fail(name, "expected block name x<i>");
    for (std::size_t i = 1; i < name.text.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name.text[i])))
        lex_.fail(name, "expected block name x<i>");
    return std::stoi(name.text.substr(1));
  }

  // expr := term (('+'|'-') term)*
  Polynomial parse_expr() {
    bool neg = false;
    while (lex_.peek().kind == Token::Op &&
           (lex_.peek().text == "-" || lex_.peek().text == "+")) {
      if (lex_.next().text == "-") neg = !neg;
    }
    Polynomial p = parse_term();
    if (neg) p = -p;
    while (lex_.peek().kind == Token::Op &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      bool minus = lex_.next().text == "-";
      Polynomial t = parse_term();
      p = minus ? p - t : p + t;
    }
    return p;
  }

  // term := factor ('*' factor)*
  Polynomial parse_term() {
    Polynomial p = parse_factor();
    while (lex_.peek().kind == Token::Op && lex_.peek().text == "*") {
      lex_.next();
      p = p * parse_factor();
    }
    return p;
  }

  // factor := atom ('^' INT)?
  Polynomial parse_factor() {
    Polynomial p = parse_atom();
    if (lex_.peek().kind == Token::Op && lex_.peek().text == "^") {
      lex_.next();
      Token e = lex_.next();
      if (e.kind != Token::Number || e.value != std::floor(e.value) || e.value < 1)
        lex_.fail(e, "exponent must be a positive integer literal");
      if (e.value > 64) lex_.fail(e, "exponent exceeds internal degree limit");
      p = p.pow(static_cast<int>(e.value));
    }
    return p;
  }

  Polynomial parse_atom() {
    Token t = lex_.next();
    if (t.kind == Token::Number) return Polynomial::constant(layout_, t.value);
    if (t.kind == Token::Var) {
      VarRef v{t.block, t.coord};
      if (!layout_->contains(v)) lex_.fail(t, "unknown variable");
      return Polynomial::variable(layout_, v);
    }
    if (t.kind == Token::Op && t.text == "(") {
      Polynomial p = parse_expr();
      expect_op(")");
      return p;
    }
    if (t.kind == Token::Op && t.text == "-") return -parse_atom();
    lex_.fail(t, "expected a number, variable or '('");
  }

  void expect_word(const std::string& w) {
    Token t = lex_.next();
    if (t.kind != Token::Word || t.text != w) lex_.fail(t, "expected '" + w + "'");
  }
  void expect_op(const std::string& op) {
    Token t = lex_.next();
    if (t.kind != Token::Op || t.text != op) lex_.fail(t, "expected '" + op + "'");
  }
  int expect_int(const std::string& what) {
    Token t = lex_.next();
    if (t.kind != Token::Number || t.value != std::floor(t.value))
      lex_.fail(t, "expected integer " + what);
    return static_cast<int>(t.value);
  }

  Lexer lex_;
  LayoutPtr layout_;
};

std::string format_coeff(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_poly(std::ostream& os, const Polynomial& p) {
  if (p.is_zero()) {
    os << "0";
    return;
  }
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    double v = c;
    if (first) {
      if (v < 0) {
        os << "- ";
        v = -v;
      }
    } else {
      os << (v < 0 ? " - " : " + ");
      v = std::abs(v);
    }
    first = false;
    if (m.degree() == 0) {
      os << format_coeff(v);
    } else {
      if (v != 1.0) os << format_coeff(v) << "*";
      os << m.str();
    }
  }
}

}  // namespace

GneppInstance parse_instance(const std::string& text) { return Parser(text).parse(); }

GneppInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  GneppInstance inst = parse_instance(ss.str());
  inst.name = path;
  return inst;
}

std::string serialize_instance(const GneppInstance& inst) {
  std::ostringstream os;
  os << "players " << inst.num_players() << "\n";
  for (int i = 1; i <= inst.num_players(); ++i)
    os << "block x" << i << " " << inst.layout->dim(i) << "\n";
  for (int i = 1; i <= inst.num_players(); ++i) {
    const auto& pl = inst.players[i - 1];
    os << "player " << i << "\n";
    os << "objective: ";
    write_poly(os, pl.objective);
    os << "\n";
    for (const auto& c : pl.constraints) {
      os << "constraint: ";
      write_poly(os, c.poly);
      os << (c.rel == Relation::Eq ? " == 0" : " >= 0") << "\n";
    }
  }
  return os.str();
}

GneppInstance random_instance(int players, const std::vector<int>& dims, int degree,
                              JointConstraint kind, std::uint64_t seed) {
  if (players < 2) throw InputError("random instance needs N >= 2");
  if (static_cast<int>(dims.size()) != players) throw InputError("dims must list every player");
  if (degree < 1) throw InputError("degree must be >= 1");
  auto layout = std::make_shared<BlockLayout>(dims);
  int n = layout->total_dim();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  // dense basis over all variables: exponent tuples across the flat layout
  std::vector<Monomial> full_basis;
  for (const auto& exps : exponent_tuples(n, degree)) {
    Monomial m;
    int flat = 0;
    for (int b = 1; b <= players; ++b)
      for (int j = 1; j <= layout->dim(b); ++j, ++flat)
        if (exps[flat] > 0) m = m * Monomial::variable(VarRef{b, j}, exps[flat]);
    full_basis.push_back(m);
  }

  GneppInstance inst;
  inst.layout = layout;
  std::ostringstream nm;
  nm << "random-N" << players << "-d" << degree << "-"
     << (kind == JointConstraint::Simplex ? "simplex" : "ball") << "-seed" << seed;
  inst.name = nm.str();

  Polynomial shared_eq(layout);   // sum x - 1 (simplex)
  Polynomial shared_ball(layout); // 1 - |x|^2 (ball)
  for (int b = 1; b <= players; ++b)
    for (int j = 1; j <= layout->dim(b); ++j) {
      auto x = Polynomial::variable(layout, b, j);
      shared_eq += x;
      shared_ball -= x * x;
    }
  shared_eq -= Polynomial::constant(layout, 1.0);
  shared_ball += Polynomial::constant(layout, 1.0);

  for (int i = 1; i <= players; ++i) {
    PlayerProblem pl;
    Polynomial f(layout);
    for (const auto& m : full_basis) f.add_term(m, unif(rng));
    double scale = f.max_abs_coeff();
    if (scale > 0) f = f.scaled(1.0 / scale);
    pl.objective = f;
    if (kind == JointConstraint::Simplex) {
      for (int b = 1; b <= players; ++b)
        for (int j = 1; j <= layout->dim(b); ++j)
          pl.constraints.push_back({Polynomial::variable(layout, b, j), Relation::Geq});
      pl.constraints.push_back({shared_eq, Relation::Eq});
    } else {
      pl.constraints.push_back({shared_ball, Relation::Geq});
    }
    inst.players.push_back(std::move(pl));
  }
  return inst;
}

Eigen::VectorXd random_instance_start(const GneppInstance& inst, JointConstraint kind) {
  int n = inst.layout->total_dim();
  if (kind == JointConstraint::Simplex)
    return Eigen::VectorXd::Constant(n, 1.0 / n);
  return Eigen::VectorXd::Zero(n);
}

}  // namespace gnepp
