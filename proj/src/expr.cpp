#include "hcb/expr.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "hcb/error.hpp"

namespace hcb {

struct Expr::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Neg, Min, Max } kind;
  Rational value;
  double value_d = 0;
  int var = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, what + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+')) {
        lhs = make(Kind::Add, {lhs, term()});
      } else if (eat('-')) {
        lhs = make(Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (eat('*')) lhs = make(Kind::Mul, {lhs, unary()});
    return lhs;
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, {unary()});
    if (eat('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view word = s_.substr(start, pos_ - start);
      if (word == "xu" || word == "xc" || word == "xs") {
        auto n = std::make_shared<Expr::Node>();
        n->kind = Kind::Var;
        n->var = word == "xu" ? 0 : (word == "xc" ? 1 : 2);
        return n;
      }
      if (word == "min" || word == "max") {
        if (!eat('(')) fail("expected '('");
        NodePtr a = expr();
        if (!eat(',')) fail("expected ','");
        NodePtr b = expr();
        if (!eat(')')) fail("expected ')'");
        return make(word == "min" ? Kind::Min : Kind::Max, {a, b});
      }
      pos_ = start;
      fail("unknown name '" + std::string(word) + "'");
    }
    fail("unexpected character");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      digits();
    }
    if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      digits();
    }
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Const;
    n->value = parse_rational(s_.substr(start, pos_ - start));
    n->value_d = n->value.get_d();
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Expr::Node& n, const double* x) {
  switch (n.kind) {
    case Kind::Const: return n.value_d;
    case Kind::Var: return x[n.var];
    case Kind::Add: return eval(*n.args[0], x) + eval(*n.args[1], x);
    case Kind::Sub: return eval(*n.args[0], x) - eval(*n.args[1], x);
    case Kind::Mul: return eval(*n.args[0], x) * eval(*n.args[1], x);
    case Kind::Neg: return -eval(*n.args[0], x);
    case Kind::Min: return std::min(eval(*n.args[0], x), eval(*n.args[1], x));
    case Kind::Max: return std::max(eval(*n.args[0], x), eval(*n.args[1], x));
  }
  return 0.0;
}

std::optional<AffineForm> affine_of(const Expr::Node& n) {
  auto is_const = [](const AffineForm& f) { return f.cu == 0 && f.cc == 0 && f.cs == 0; };
  auto scale = [](AffineForm f, const Rational& s) {
    f.c0 *= s;
    f.cu *= s;
    f.cc *= s;
    f.cs *= s;
    return f;
  };
  switch (n.kind) {
    case Kind::Const: {
      AffineForm f;
      f.c0 = n.value;
      return f;
    }
    case Kind::Var: {
      AffineForm f;
      (n.var == 0 ? f.cu : n.var == 1 ? f.cc : f.cs) = 1;
      return f;
    }
    case Kind::Neg: {
      auto a = affine_of(*n.args[0]);
      if (!a) return std::nullopt;
      return scale(*a, Rational(-1));
    }
    case Kind::Add:
    case Kind::Sub: {
      auto a = affine_of(*n.args[0]);
      auto b = affine_of(*n.args[1]);
      if (!a || !b) return std::nullopt;
      const Rational s = n.kind == Kind::Add ? 1 : -1;
      a->c0 += s * b->c0;
      a->cu += s * b->cu;
      a->cc += s * b->cc;
      a->cs += s * b->cs;
      return a;
    }
    case Kind::Mul: {
      auto a = affine_of(*n.args[0]);
      auto b = affine_of(*n.args[1]);
      if (!a || !b) return std::nullopt;
      if (is_const(*a)) return scale(*b, a->c0);
      if (is_const(*b)) return scale(*a, b->c0);
      return std::nullopt;
    }
    case Kind::Min:
    case Kind::Max: return std::nullopt;
  }
  return std::nullopt;
}

bool uses(const Expr::Node& n, int var) {
  if (n.kind == Kind::Var) return n.var == var;
  for (const auto& a : n.args) {
    if (uses(*a, var)) return true;
  }
  return false;
}

}  // namespace

double AffineForm::operator()(double xu, double xc, double xs) const {
  return c0.get_d() + cu.get_d() * xu + cc.get_d() * xc + cs.get_d() * xs;
}

Rational AffineForm::sup_abs() const {
  Rational hi = c0, lo = c0;
  for (const Rational* c : {&cu, &cc, &cs}) {
    if (*c > 0) hi += *c;
    else lo += *c;
  }
  return std::max(Rational(abs(hi)), Rational(abs(lo)));
}

Rational AffineForm::grad_norm_squared() const { return cu * cu + cc * cc + cs * cs; }

Expr Expr::parse(std::string_view text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double Expr::operator()(double xu, double xc, double xs) const {
  const double x[3] = {xu, xc, xs};
  return eval(*root_, x);
}

std::optional<AffineForm> Expr::affine() const { return affine_of(*root_); }

bool Expr::uses_xu() const { return uses(*root_, 0); }
bool Expr::uses_xc() const { return uses(*root_, 1); }
bool Expr::uses_xs() const { return uses(*root_, 2); }

}  // namespace hcb
