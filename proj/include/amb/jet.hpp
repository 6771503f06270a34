// Truncated multivariate power series in spatial variables x_0..x_{n-1}
// plus the ambient variable u.
//
// Monomials are packed 6 bits per variable (u occupies slot n_vars).  Each jet
// carries a validity window: a coefficient of x^a u^k is trusted only when
// |a| + w*k <= W and k <= U, where w is JetSpec::u_weight.  Derivatives shrink
// the window; products take the intersection.  Terms outside the window are
// never stored.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "amb/scalar.hpp"

namespace amb {

struct SpecMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kMaxJetVars = 9;  // spatial; u makes ten packed slots
constexpr int kBits = 6;
constexpr uint64_t kFieldMask = (uint64_t{1} << kBits) - 1;

struct JetSpec {
  int n_vars = 1;
  int spatial_degree = 0;
  int u_order = 0;
  CoeffMode mode = CoeffMode::Rational;
  // 0: plain bi-graded caps.  2: the ambient budget |a| + 2k <= D_x, which
  // matches the two spatial derivatives consumed per u-order.
  int u_weight = 0;

  void validate() const {
    if (n_vars < 1 || n_vars > kMaxJetVars) throw std::invalid_argument("JetSpec: n_vars out of range");
    if (spatial_degree < 0 || u_order < 0) throw std::invalid_argument("JetSpec: negative cap");
    if (spatial_degree > 60 || u_order > 60) throw std::invalid_argument("JetSpec: cap too large");
    if (u_weight < 0) throw std::invalid_argument("JetSpec: negative u weight");
  }
  int u_var() const { return n_vars; }
  bool operator==(const JetSpec& o) const {
    return n_vars == o.n_vars && spatial_degree == o.spatial_degree && u_order == o.u_order &&
           mode == o.mode && u_weight == o.u_weight;
  }
  bool operator!=(const JetSpec& o) const { return !(*this == o); }
};

struct Mono {
  uint64_t key = 0;
  int16_t xdeg = 0;
  int16_t udeg = 0;
};

inline int mono_exp(uint64_t key, int var) { return static_cast<int>((key >> (kBits * var)) & kFieldMask); }

template <class S>
class Jet {
 public:
  using Traits = Scalar<S>;
  using Term = std::pair<Mono, S>;

  Jet() = default;
  explicit Jet(const JetSpec& spec) : spec_(spec), W_(spec.spatial_degree), U_(spec.u_order) {
    if (spec.mode != Traits::mode) throw SpecMismatch("JetSpec coefficient mode does not match scalar type");
  }

  static Jet zero(const JetSpec& spec) { return Jet(spec); }
  static Jet constant(const JetSpec& spec, const S& c) {
    Jet j(spec);
    if (!Traits::is_zero(c)) j.terms_.push_back({Mono{}, c});
    return j;
  }
  static Jet variable(const JetSpec& spec, int var) {
    Jet j(spec);
    std::vector<int> e(spec.n_vars + 1, 0);
    e.at(var) = 1;
    j.add_term(e, S(1));
    return j;
  }
  static Jet u(const JetSpec& spec) { return variable(spec, spec.n_vars); }

  // exps has n_vars+1 entries, the last is the u exponent.
  static Jet monomial(const JetSpec& spec, const std::vector<int>& exps, const S& c) {
    Jet j(spec);
    j.add_term(exps, c);
    return j;
  }

  const JetSpec& spec() const { return spec_; }
  int valid_weight() const { return W_; }
  int valid_u() const { return U_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  bool in_window(const Mono& m) const {
    return m.xdeg <= spec_.spatial_degree && m.udeg <= spec_.u_order && m.udeg <= U_ &&
           m.xdeg + spec_.u_weight * m.udeg <= W_;
  }

  S coeff(const std::vector<int>& exps) const {
    Mono m = pack(exps);
    for (const auto& t : terms_)
      if (t.first.key == m.key) return t.second;
    return S(0);
  }
  S constant_term() const {
    if (!terms_.empty() && terms_.front().first.key == 0) return terms_.front().second;
    return S(0);
  }

  // Narrows the validity window, dropping terms that fall outside.
  Jet& restrict_window(int W, int U) {
    W_ = std::min(W_, W);
    U_ = std::min(U_, U);
    drop_outside();
    return *this;
  }
  Jet restricted(int W, int U) const {
    Jet r = *this;
    r.restrict_window(W, U);
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }
  Jet& operator+=(const Jet& b) { return *this = combine(*this, b, false); }
  Jet& operator-=(const Jet& b) { return *this = combine(*this, b, true); }
  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, false); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, true); }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  Jet& operator*=(const Jet& b) { return *this = mul(*this, b); }
  Jet scaled(const S& c) const {
    if (Traits::is_zero(c)) {
      Jet r(spec_);
      r.W_ = W_;
      r.U_ = U_;
      return r;
    }
    Jet r = *this;
    for (auto& t : r.terms_) t.second *= c;
    return r;
  }
  friend Jet operator*(const S& c, const Jet& a) { return a.scaled(c); }
  Jet plus_constant(const S& c) const { return *this + constant(spec_, c).restricted(W_, U_); }

  static Jet combine(const Jet& a, const Jet& b, bool subtract) {
    check_spec(a, b);
    Jet r(a.spec_);
    r.W_ = std::min(a.W_, b.W_);
    r.U_ = std::min(a.U_, b.U_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0, j = 0;
    const int w = a.spec_.u_weight;
    auto before = [w](const Mono& x, const Mono& y) {
      int wx = x.xdeg + w * x.udeg, wy = y.xdeg + w * y.udeg;
      return wx != wy ? wx < wy : x.key < y.key;
    };
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && before(a.terms_[i].first, b.terms_[j].first))) {
        if (r.in_window(a.terms_[i].first)) r.terms_.push_back(a.terms_[i]);
        ++i;
      } else if (i == a.terms_.size() || before(b.terms_[j].first, a.terms_[i].first)) {
        if (r.in_window(b.terms_[j].first))
          r.terms_.push_back({b.terms_[j].first, subtract ? S(-b.terms_[j].second) : b.terms_[j].second});
        ++j;
      } else {
        if (r.in_window(a.terms_[i].first)) {
          S s = subtract ? S(a.terms_[i].second - b.terms_[j].second) : S(a.terms_[i].second + b.terms_[j].second);
          if (!Traits::is_zero(s)) r.terms_.push_back({a.terms_[i].first, s});
        }
        ++i;
        ++j;
      }
    }
    return r;
  }

  // Lowest weight and lowest u-degree that can carry a nonzero coefficient,
  // counting everything outside the window as possibly nonzero.
  std::pair<int, int> valuation() const {
    int ow = W_ + 1, ou = U_ + 1;
    for (const auto& t : terms_) {
      ow = std::min(ow, t.first.xdeg + spec_.u_weight * t.first.udeg);
      ou = std::min(ou, static_cast<int>(t.first.udeg));
    }
    return {ow, ou};
  }
  // Window on which a*b is determined: a coefficient of the product is known
  // when every split pairs known factors or meets a factor below its
  // valuation.
  static std::pair<int, int> product_window(const Jet& a, const Jet& b) {
    auto [oa, oua] = a.valuation();
    auto [ob, oub] = b.valuation();
    int W = std::min({a.W_ + ob, b.W_ + oa, a.spec_.spatial_degree});
    int U = std::min({a.U_ + oub, b.U_ + oua, a.spec_.u_order});
    return {W, U};
  }

  static Jet mul(const Jet& a, const Jet& b) {
    check_spec(a, b);
    Jet r(a.spec_);
    std::tie(r.W_, r.U_) = product_window(a, b);
    if (a.terms_.empty() || b.terms_.empty()) return r;
    const int w = a.spec_.u_weight;
    const int D = a.spec_.spatial_degree, K = std::min(a.spec_.u_order, r.U_);
    // Single-term fast path (constants and monomials are common in tensor loops).
    if (a.terms_.size() == 1 && a.terms_[0].first.key == 0) return b.scaled(a.terms_[0].second).restricted(r.W_, r.U_);
    if (b.terms_.size() == 1 && b.terms_[0].first.key == 0) return a.scaled(b.terms_[0].second).restricted(r.W_, r.U_);

    std::unordered_map<uint64_t, uint32_t> index;
    std::vector<std::pair<Mono, typename Traits::Acc>> acc;
    index.reserve(a.terms_.size() * 2 + b.terms_.size() * 2);
    for (const auto& ta : a.terms_) {
      const Mono& ma = ta.first;
      const int wa = ma.xdeg + w * ma.udeg;
      if (wa > r.W_) break;
      for (const auto& tb : b.terms_) {
        const Mono& mb = tb.first;
        const int wb = mb.xdeg + w * mb.udeg;
        if (wa + wb > r.W_) break;
        const int xd = ma.xdeg + mb.xdeg, ud = ma.udeg + mb.udeg;
        if (xd > D || ud > K) continue;
        const uint64_t key = ma.key + mb.key;
        auto it = index.find(key);
        if (it == index.end()) {
          index.emplace(key, static_cast<uint32_t>(acc.size()));
          acc.push_back({Mono{key, static_cast<int16_t>(xd), static_cast<int16_t>(ud)}, {}});
          acc.back().second.add_product(ta.second, tb.second);
        } else {
          acc[it->second].second.add_product(ta.second, tb.second);
        }
      }
    }
    r.terms_.reserve(acc.size());
    for (auto& p : acc) {
      S v = p.second.value();
      if (!Traits::is_zero(v)) r.terms_.push_back({p.first, std::move(v)});
    }
    r.sort_terms();
    return r;
  }

  // Formal partial derivative; var == n_vars differentiates in u.
  Jet partial(int var) const {
    if (var < 0 || var > spec_.n_vars) throw std::out_of_range("Jet::partial: bad variable id");
    const bool is_u = var == spec_.n_vars;
    Jet r(spec_);
    r.W_ = W_ - (is_u ? spec_.u_weight : 1);
    r.U_ = is_u ? U_ - 1 : U_;
    if (r.W_ < 0 || r.U_ < 0)
      throw BudgetExhausted("jet derivative exceeds the remaining derivative budget");
    const uint64_t unit = uint64_t{1} << (kBits * var);
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      int e = mono_exp(t.first.key, var);
      if (e == 0) continue;
      Mono m{t.first.key - unit, static_cast<int16_t>(t.first.xdeg - (is_u ? 0 : 1)),
             static_cast<int16_t>(t.first.udeg - (is_u ? 1 : 0))};
      if (!r.in_window(m)) continue;
      r.terms_.push_back({m, t.second * Traits::from_int(e)});
    }
    return r;
  }
  Jet du() const { return partial(spec_.n_vars); }

  // Coefficient of u^k, returned as a u-independent jet.
  Jet u_coeff(int k) const {
    Jet r(spec_);
    r.W_ = W_ - spec_.u_weight * k;
    r.U_ = spec_.u_order;
    if (k > U_ || r.W_ < 0) throw BudgetExhausted("requested u-coefficient lies outside the valid window");
    const uint64_t shift = uint64_t(k) << (kBits * spec_.n_vars);
    for (const auto& t : terms_)
      if (t.first.udeg == k) {
        Mono m{t.first.key - shift, t.first.xdeg, 0};
        if (r.in_window(m)) r.terms_.push_back({m, t.second});
      }
    r.sort_terms();
    return r;
  }
  // Multiply by u^k.
  Jet shift_u(int k) const {
    Jet r(spec_);
    r.W_ = std::min(spec_.spatial_degree, W_ + spec_.u_weight * k);
    r.U_ = std::min(spec_.u_order, U_ + k);
    const uint64_t shift = uint64_t(k) << (kBits * spec_.n_vars);
    for (const auto& t : terms_) {
      Mono m{t.first.key + shift, t.first.xdeg, static_cast<int16_t>(t.first.udeg + k)};
      if (r.in_window(m)) r.terms_.push_back({m, t.second});
    }
    r.sort_terms();
    return r;
  }
  // Sets u = 0.
  Jet at_u0() const { return u_coeff(0); }
  // Termwise u-antiderivative vanishing at u = 0.
  Jet u_integral() const {
    Jet r(spec_);
    r.W_ = std::min(spec_.spatial_degree, W_ + spec_.u_weight);
    r.U_ = std::min(spec_.u_order, U_ + 1);
    const uint64_t unit = uint64_t{1} << (kBits * spec_.n_vars);
    for (const auto& t : terms_) {
      Mono m{t.first.key + unit, t.first.xdeg, static_cast<int16_t>(t.first.udeg + 1)};
      if (r.in_window(m)) r.terms_.push_back({m, t.second / Traits::from_int(t.first.udeg + 1)});
    }
    r.sort_terms();
    return r;
  }

  // f(a) by composing the univariate Taylor series of f at the constant term.
  // coeffs[j] = f^(j)(c)/j!.
  Jet compose(const std::vector<S>& coeffs) const {
    S c0 = constant_term();
    Jet h = plus_constant(S(-c0));
    Jet r = constant(spec_, coeffs.back()).restricted(W_, U_);
    for (int j = static_cast<int>(coeffs.size()) - 2; j >= 0; --j) r = (r * h).plus_constant(coeffs[j]);
    return r;
  }
  // Every non-constant monomial has weight >= 1 (or u-degree >= 1 when the
  // u weight is zero), so h^j vanishes beyond this power.
  int max_power_needed() const {
    const int U = std::min(U_, spec_.u_order);
    return spec_.u_weight >= 1 ? W_ : W_ + U;
  }

  Jet invert() const {
    S c = constant_term();
    if (Traits::is_zero(c)) throw SingularInput("jet_invert: zero constant term");
    const int J = max_power_needed();
    std::vector<S> co(J + 1);
    S inv = S(1) / c, p = inv;
    for (int j = 0; j <= J; ++j) {
      co[j] = (j % 2 == 0) ? p : S(-p);
      p *= inv;
    }
    return compose(co);
  }
  Jet exp() const {
    S c = constant_term();
    const int J = max_power_needed();
    std::vector<S> co(J + 1);
    S e = Traits::exp_at(c);
    for (int j = 0; j <= J; ++j) {
      co[j] = e;
      e /= Traits::from_int(j + 1);
    }
    return compose(co);
  }
  Jet log() const {
    S c = constant_term();
    if (!(Traits::to_double(c) > 0)) throw DomainError("jet log: constant term must be positive");
    const int J = max_power_needed();
    std::vector<S> co(J + 1);
    co[0] = Traits::log_at(c);
    S inv = S(1) / c, p = inv;
    for (int j = 1; j <= J; ++j) {
      co[j] = p / Traits::from_int(j);
      if (j % 2 == 0) co[j] = -co[j];
      p *= inv;
    }
    return compose(co);
  }
  Jet pow(const Q& r) const {
    S c = constant_term();
    const int J = max_power_needed();
    std::vector<S> co(J + 1);
    S rr = Traits::from_q(r);
    // Integer powers of any constant are fine; fractional need c > 0.
    S base;
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) {
      long e = r.get_num().get_si();
      if (Traits::is_zero(c) && e < 0) throw SingularInput("negative power of jet with zero constant term");
      if (Traits::is_zero(c)) return pow_nonneg_int(e);
      base = S(1);
      S b = e < 0 ? S(S(1) / c) : c;
      for (long i = 0; i < (e < 0 ? -e : e); ++i) base *= b;
    } else {
      if (!(Traits::to_double(c) > 0)) throw DomainError("jet pow: constant term must be positive");
      base = Traits::pow_at(c, r);
    }
    S inv = S(1) / c, binom = S(1), p = S(1);
    for (int j = 0; j <= J; ++j) {
      co[j] = base * binom * p;
      binom = binom * (rr - Traits::from_int(j)) / Traits::from_int(j + 1);
      p *= inv;
    }
    return compose(co);
  }
  Jet sqrt() const { return pow(Q(1, 2)); }
  Jet sin() const { return trig(false); }
  Jet cos() const { return trig(true); }

  double max_abs() const {
    double m = 0;
    for (const auto& t : terms_) m = std::max(m, std::abs(Traits::to_double(t.second)));
    return m;
  }
  // Largest |coefficient| over the u^k part, k < k_end.
  double max_abs_below_u(int k_end) const {
    double m = 0;
    for (const auto& t : terms_)
      if (t.first.udeg < k_end) m = std::max(m, std::abs(Traits::to_double(t.second)));
    return m;
  }

  // Equality on the common validity window.
  friend bool operator==(const Jet& a, const Jet& b) { return (a - b).is_zero(); }

  std::string str(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      if (!first) os << " + ";
      first = false;
      os << Traits::str(t.second);
      for (int v = 0; v <= spec_.n_vars; ++v) {
        int e = mono_exp(t.first.key, v);
        if (e == 0) continue;
        std::string nm = v < static_cast<int>(names.size()) ? names[v]
                                                            : (v == spec_.n_vars ? "u" : "x" + std::to_string(v + 1));
        os << "*" << nm;
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

  std::vector<int> exponents(const Mono& m) const {
    std::vector<int> e(spec_.n_vars + 1);
    for (int v = 0; v <= spec_.n_vars; ++v) e[v] = mono_exp(m.key, v);
    return e;
  }

  // Converts coefficients to another backend (rational -> float).
  template <class T>
  Jet<T> convert(const JetSpec& spec) const {
    Jet<T> r(spec);
    r.set_window(W_, U_);
    for (const auto& t : terms_) r.push_raw(t.first, Scalar<T>::from_q(Q(t.second)));
    return r;
  }

  void set_window(int W, int U) {
    W_ = W;
    U_ = U;
  }
  void push_raw(const Mono& m, const S& c) {
    if (!Traits::is_zero(c) && in_window(m)) terms_.push_back({m, c});
    sort_terms();
  }

 private:
  JetSpec spec_;
  int W_ = 0, U_ = 0;
  std::vector<Term> terms_;

  static void check_spec(const Jet& a, const Jet& b) {
    if (a.spec_ != b.spec_) throw SpecMismatch("jets with different JetSpec");
  }

  Mono pack(const std::vector<int>& exps) const {
    if (static_cast<int>(exps.size()) != spec_.n_vars + 1) throw std::invalid_argument("monomial arity");
    Mono m;
    for (int v = 0; v <= spec_.n_vars; ++v) {
      if (exps[v] < 0 || exps[v] > static_cast<int>(kFieldMask)) throw std::invalid_argument("exponent range");
      m.key |= uint64_t(exps[v]) << (kBits * v);
      if (v < spec_.n_vars)
        m.xdeg += exps[v];
      else
        m.udeg = exps[v];
    }
    return m;
  }
  void add_term(const std::vector<int>& exps, const S& c) {
    Mono m = pack(exps);
    if (Traits::is_zero(c) || !in_window(m)) return;
    *this = *this + from_single(m, c);
  }
  Jet from_single(const Mono& m, const S& c) const {
    Jet r(spec_);
    r.terms_.push_back({m, c});
    return r;
  }
  void drop_outside() {
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(), [&](const Term& t) { return !in_window(t.first); }),
                 terms_.end());
  }
  void sort_terms() {
    const int w = spec_.u_weight;
    std::sort(terms_.begin(), terms_.end(), [w](const Term& x, const Term& y) {
      int wx = x.first.xdeg + w * x.first.udeg, wy = y.first.xdeg + w * y.first.udeg;
      return wx != wy ? wx < wy : x.first.key < y.first.key;
    });
  }
  Jet pow_nonneg_int(long e) const {
    Jet r = constant(spec_, S(1)).restricted(W_, U_);
    for (long i = 0; i < e; ++i) r = r * *this;
    return r;
  }
  Jet trig(bool cosine) const {
    S c = constant_term();
    const int J = max_power_needed();
    S s0 = Traits::sin_at(c), c0 = Traits::cos_at(c);
    // derivatives cycle: sin, cos, -sin, -cos (for sin); cos, -sin, -cos, sin
    S cyc[4] = {cosine ? c0 : s0, cosine ? S(-s0) : c0, cosine ? S(-c0) : S(-s0), cosine ? s0 : S(-c0)};
    std::vector<S> co(J + 1);
    S fact = S(1);
    for (int j = 0; j <= J; ++j) {
      co[j] = cyc[j % 4] / fact;
      fact *= Traits::from_int(j + 1);
    }
    return compose(co);
  }
};

template <class S>
Jet<S> operator*(const Jet<S>& a, long c) {
  return a.scaled(Scalar<S>::from_int(c));
}

}  // namespace amb
