#include "amb/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace amb {

Q parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty rational", 0);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Q a = parse_rational(s.substr(0, slash)), b = parse_rational(s.substr(slash + 1));
    if (sgn(b) == 0) throw ParseError("zero denominator", slash);
    return a / b;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  mpz_class num = 0, den = 1;
  bool digits = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    num = num * 10 + (s[i++] - '0');
    digits = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      num = num * 10 + (s[i++] - '0');
      den *= 10;
      digits = true;
    }
  }
  if (!digits) throw ParseError("expected digits", i);
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    int ex = 0;
    bool edig = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ex = ex * 10 + (s[i++] - '0');
      edig = true;
      if (ex > 400) throw ParseError("exponent too large", i);
    }
    if (!edig) throw ParseError("expected exponent digits", i);
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, ex);
    if (eneg)
      den *= p;
    else
      num *= p;
  }
  if (i != s.size()) throw ParseError("unexpected character in rational", i);
  Q q(neg ? mpz_class(-num) : num, den);
  q.canonicalize();
  return q;
}

ExprPtr make_const(const Q& c) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->value = c;
  return e;
}
ExprPtr make_coord(int i) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Coord;
  e->coord = i;
  return e;
}
static ExprPtr make_node(Op op, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  return e;
}
ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
  return make_node(Op::Add, {a, b});
}
ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
  return make_node(Op::Mul, {a, b});
}
ExprPtr make_pow(ExprPtr a, ExprPtr b) { return make_node(Op::Pow, {a, b}); }
ExprPtr make_fn(Op fn, ExprPtr a) { return make_node(fn, {a}); }

bool is_constant(const ExprPtr& e) {
  if (e->op == Op::Const) return true;
  if (e->op == Op::Coord) return false;
  for (const auto& a : e->args)
    if (!is_constant(a)) return false;
  return true;
}
bool is_literal_zero(const ExprPtr& e) { return e->op == Op::Const && sgn(e->value) == 0; }

namespace {

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

  ExprPtr parse() {
    ExprPtr e = sum();
    skip();
    if (i_ != s_.size()) throw ParseError("unexpected trailing input", i_);
    return e;
  }

 private:
  const std::string& s_;
  const std::vector<std::string>& names_;
  size_t i_ = 0;

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  ExprPtr sum() {
    ExprPtr e = prod();
    for (;;) {
      if (eat('+'))
        e = make_add(e, prod());
      else if (eat('-'))
        e = make_add(e, make_mul(make_const(-1), prod()));
      else
        return e;
    }
  }
  ExprPtr prod() {
    ExprPtr e = unary();
    for (;;) {
      if (eat('*'))
        e = make_mul(e, unary());
      else if (eat('/')) {
        size_t at = i_;
        ExprPtr d = unary();
        if (is_literal_zero(d)) throw ParseError("division by zero", at);
        e = make_mul(e, d->op == Op::Const ? make_const(1 / d->value) : make_pow(d, make_const(-1)));
      } else
        return e;
    }
  }
  ExprPtr unary() {
    if (eat('-')) return make_mul(make_const(-1), unary());
    if (eat('+')) return unary();
    return power();
  }
  ExprPtr power() {
    ExprPtr b = atom();
    if (eat('^')) {
      ExprPtr ex = unary();
      if (b->op == Op::Const && ex->op == Op::Const && ex->value.get_den() == 1 && ex->value.get_num().fits_slong_p()) {
        long k = ex->value.get_num().get_si();
        if (k >= 0 && k <= 64) {
          Q r = 1;
          for (long j = 0; j < k; ++j) r *= b->value;
          return make_const(r);
        }
      }
      return make_pow(b, ex);
    }
    return b;
  }
  ExprPtr atom() {
    skip();
    if (i_ >= s_.size()) throw ParseError("unexpected end of expression", i_);
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = i_;
      while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
      if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E') && i_ + 1 < s_.size() &&
          (std::isdigit(static_cast<unsigned char>(s_[i_ + 1])) ||
           ((s_[i_ + 1] == '-' || s_[i_ + 1] == '+') && i_ + 2 < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[i_ + 2]))))) {
        i_ += 2;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      }
      try {
        return make_const(parse_rational(s_.substr(start, i_ - start)));
      } catch (const ParseError& err) {
        throw ParseError("malformed number", start);
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      std::string name = s_.substr(start, i_ - start);
      for (size_t k = 0; k < names_.size(); ++k)
        if (names_[k] == name) return make_coord(static_cast<int>(k));
      Op fn;
      bool is_sqrt = false;
      if (name == "sin")
        fn = Op::Sin;
      else if (name == "cos")
        fn = Op::Cos;
      else if (name == "exp")
        fn = Op::Exp;
      else if (name == "log")
        fn = Op::Log;
      else if (name == "sqrt") {
        fn = Op::Pow;
        is_sqrt = true;
      } else
        throw ParseError("unknown identifier '" + name + "'", start);
      if (!eat('(')) throw ParseError("expected '(' after " + name, i_);
      ExprPtr a = sum();
      if (!eat(')')) throw ParseError("expected ')'", i_);
      if (is_sqrt) return make_pow(a, make_const(Q(1, 2)));
      if (a->op == Op::Const && sgn(a->value) == 0) {
        if (fn == Op::Sin) return make_const(0);
        if (fn == Op::Cos || fn == Op::Exp) return make_const(1);
      }
      return make_fn(fn, a);
    }
    if (eat('(')) {
      ExprPtr e = sum();
      if (!eat(')')) throw ParseError("expected ')'", i_);
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& text, const std::vector<std::string>& coord_names) {
  return Parser(text, coord_names).parse();
}

std::string to_string(const ExprPtr& e, const std::vector<std::string>& names) {
  switch (e->op) {
    case Op::Const:
      return e->value.get_den() == 1 ? e->value.get_str() : "(" + e->value.get_str() + ")";
    case Op::Coord:
      return e->coord < static_cast<int>(names.size()) ? names[e->coord] : "x" + std::to_string(e->coord + 1);
    case Op::Add:
      return "(" + to_string(e->args[0], names) + " + " + to_string(e->args[1], names) + ")";
    case Op::Mul:
      return to_string(e->args[0], names) + "*" + to_string(e->args[1], names);
    case Op::Pow:
      return "(" + to_string(e->args[0], names) + ")^(" + to_string(e->args[1], names) + ")";
    case Op::Sin:
      return "sin(" + to_string(e->args[0], names) + ")";
    case Op::Cos:
      return "cos(" + to_string(e->args[0], names) + ")";
    case Op::Exp:
      return "exp(" + to_string(e->args[0], names) + ")";
    case Op::Log:
      return "log(" + to_string(e->args[0], names) + ")";
  }
  return "?";
}

double eval(const ExprPtr& e, const std::vector<double>& x) {
  switch (e->op) {
    case Op::Const:
      return e->value.get_d();
    case Op::Coord:
      return x.at(e->coord);
    case Op::Add:
      return eval(e->args[0], x) + eval(e->args[1], x);
    case Op::Mul:
      return eval(e->args[0], x) * eval(e->args[1], x);
    case Op::Pow:
      return std::pow(eval(e->args[0], x), eval(e->args[1], x));
    case Op::Sin:
      return std::sin(eval(e->args[0], x));
    case Op::Cos:
      return std::cos(eval(e->args[0], x));
    case Op::Exp:
      return std::exp(eval(e->args[0], x));
    case Op::Log:
      return std::log(eval(e->args[0], x));
  }
  return 0;
}

}  // namespace amb
