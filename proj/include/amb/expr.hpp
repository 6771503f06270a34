// Scalar field expressions over chart coordinates.
//
// Grammar:  sum   := prod (('+'|'-') prod)*
//           prod  := unary (('*'|'/') unary)*
//           unary := '-' unary | power
//           power := atom ('^' unary)?
//           atom  := number | name | fn '(' sum ')' | '(' sum ')'
// fn is one of sin cos exp log sqrt.  Numbers are read as exact rationals.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "amb/jet.hpp"

namespace amb {

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

enum class Op { Const, Coord, Add, Mul, Pow, Sin, Cos, Exp, Log };

struct Expr {
  Op op = Op::Const;
  Q value;    // Const
  int coord = -1;
  std::vector<std::shared_ptr<const Expr>> args;
};
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr parse_expr(const std::string& text, const std::vector<std::string>& coord_names);

ExprPtr make_const(const Q& c);
ExprPtr make_coord(int i);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, ExprPtr b);
ExprPtr make_fn(Op fn, ExprPtr a);

std::string to_string(const ExprPtr& e, const std::vector<std::string>& coord_names);
double eval(const ExprPtr& e, const std::vector<double>& x);
bool is_constant(const ExprPtr& e);
// True when the expression is the literal constant 0.
bool is_literal_zero(const ExprPtr& e);

// Taylor jet of e about the base point; jet variable i is the displacement
// x_i - base_i.
template <class S>
Jet<S> field_to_jet(const ExprPtr& e, const JetSpec& spec, const std::vector<S>& base) {
  using T = Scalar<S>;
  switch (e->op) {
    case Op::Const:
      return Jet<S>::constant(spec, T::from_q(e->value));
    case Op::Coord: {
      if (e->coord < 0 || e->coord >= spec.n_vars) throw std::out_of_range("coordinate outside chart");
      return Jet<S>::variable(spec, e->coord).plus_constant(base.at(e->coord));
    }
    case Op::Add:
      return field_to_jet(e->args[0], spec, base) + field_to_jet(e->args[1], spec, base);
    case Op::Mul: {
      // Skip work when a factor is literally zero.
      if (is_literal_zero(e->args[0]) || is_literal_zero(e->args[1])) return Jet<S>::zero(spec);
      return field_to_jet(e->args[0], spec, base) * field_to_jet(e->args[1], spec, base);
    }
    case Op::Pow: {
      Jet<S> b = field_to_jet(e->args[0], spec, base);
      if (e->args[1]->op == Op::Const) return b.pow(e->args[1]->value);
      return (field_to_jet(e->args[1], spec, base) * b.log()).exp();
    }
    case Op::Sin:
      return field_to_jet(e->args[0], spec, base).sin();
    case Op::Cos:
      return field_to_jet(e->args[0], spec, base).cos();
    case Op::Exp:
      return field_to_jet(e->args[0], spec, base).exp();
    case Op::Log:
      return field_to_jet(e->args[0], spec, base).log();
  }
  throw std::logic_error("unreachable");
}

}  // namespace amb
