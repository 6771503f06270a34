// Coefficient backends for jets: exact rationals (GMP) and binary64 with
// compensated accumulation.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace amb {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CoeffMode { Rational, Float };

using Q = mpq_class;

template <class S>
struct Scalar;

template <>
struct Scalar<double> {
  static constexpr bool exact = false;
  static constexpr CoeffMode mode = CoeffMode::Float;

  static double from_q(const Q& q) { return q.get_d(); }
  static double from_int(long v) { return static_cast<double>(v); }
  static double to_double(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static double abs(double x) { return std::fabs(x); }

  // Neumaier summation; the result does not depend on magnitude ordering
  // of the addends to within about one ulp.
  struct Acc {
    double s = 0.0, c = 0.0;
    void add(double x) {
      double t = s + x;
      if (std::fabs(s) >= std::fabs(x))
        c += (s - t) + x;
      else
        c += (x - t) + s;
      s = t;
    }
    void add_product(double a, double b) { add(a * b); }
    double value() const { return s + c; }
  };

  static double exp_at(double c) { return std::exp(c); }
  static double log_at(double c) {
    if (!(c > 0)) throw DomainError("log of non-positive constant term");
    return std::log(c);
  }
  static double sin_at(double c) { return std::sin(c); }
  static double cos_at(double c) { return std::cos(c); }
  static double pow_at(double c, const Q& r) {
    if (!(c > 0)) throw DomainError("fractional power of non-positive constant term");
    return std::pow(c, r.get_d());
  }
  static std::string str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <>
struct Scalar<Q> {
  static constexpr bool exact = true;
  static constexpr CoeffMode mode = CoeffMode::Rational;

  static Q from_q(const Q& q) { return q; }
  static Q from_int(long v) { return Q(v); }
  static double to_double(const Q& x) { return x.get_d(); }
  static bool is_zero(const Q& x) { return sgn(x) == 0; }
  static Q abs(const Q& x) { return ::abs(x); }

  struct Acc {
    Q s, t;
    void add(const Q& x) { s += x; }
    void add_product(const Q& a, const Q& b) {
      mpq_mul(t.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
      s += t;
    }
    const Q& value() const { return s; }
  };

  static Q exp_at(const Q& c) {
    if (sgn(c) != 0) throw DomainError("exp of nonzero constant is not rational");
    return Q(1);
  }
  static Q log_at(const Q& c) {
    if (c != 1) throw DomainError("log of constant other than 1 is not rational");
    return Q(0);
  }
  static Q sin_at(const Q& c) {
    if (sgn(c) != 0) throw DomainError("sin of nonzero constant is not rational");
    return Q(0);
  }
  static Q cos_at(const Q& c) {
    if (sgn(c) != 0) throw DomainError("cos of nonzero constant is not rational");
    return Q(1);
  }
  // c^r for rational r = p/q, exact only when c is a perfect q-th power.
  static Q pow_at(const Q& c, const Q& r) {
    if (sgn(c) <= 0) throw DomainError("fractional power of non-positive constant term");
    mpz_class p = r.get_num(), q = r.get_den();
    auto root = [&](const mpz_class& z) {
      mpz_class out;
      if (!q.fits_ulong_p() || mpz_root(out.get_mpz_t(), z.get_mpz_t(), q.get_ui()) == 0)
        throw DomainError("power of constant term is not rational");
      return out;
    };
    Q base(root(c.get_num()), root(c.get_den()));
    base.canonicalize();
    if (!p.fits_slong_p()) throw DomainError("exponent too large");
    long e = p.get_si();
    Q out(1);
    Q b = e < 0 ? Q(1) / base : base;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) out *= b;
    return out;
  }
  static std::string str(const Q& x) { return x.get_str(); }
};

// Parses "p/q", integers and finite decimals ("0.125", "-3e-2") exactly.
Q parse_rational(const std::string& text);

}  // namespace amb
