#pragma once

// Exact scalars: univariate polynomials over a field, the rational function
// field Q(delta), and integer Laurent polynomials in delta.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace thompson {

inline bool is_zero(const mpq_class& x) { return sgn(x) == 0; }
inline bool is_zero(const mpz_class& x) { return sgn(x) == 0; }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const std::complex<double>& x) { return x == 0.0; }

/// Dense polynomial over a field F, coefficients stored low degree first.
/// F needs +, -, *, / and a free `is_zero(F)`.
template <class F>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(F constant) {
    if (!is_zero(constant)) c_.push_back(std::move(constant));
  }
  explicit Polynomial(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial monomial(F coeff, int k) {
    std::vector<F> c(static_cast<size_t>(k) + 1, F(0));
    c[static_cast<size_t>(k)] = std::move(coeff);
    return Polynomial(std::move(c));
  }
  static Polynomial variable() { return monomial(F(1), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero_poly() const { return c_.empty(); }
  const std::vector<F>& coeffs() const { return c_; }

  F coeff(int i) const {
    if (i < 0 || i > degree()) return F(0);
    return c_[static_cast<size_t>(i)];
  }
  const F& lead() const { return c_.back(); }

  Polynomial operator-() const {
    std::vector<F> c = c_;
    for (auto& x : c) x = -x;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<F> c(std::max(a.c_.size(), b.c_.size()), F(0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] = c[i] + b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<F> c(a.c_.size() + b.c_.size() - 1, F(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (is_zero(a.c_[i])) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(c));
  }
  Polynomial scaled(const F& s) const {
    std::vector<F> c = c_;
    for (auto& x : c) x = x * s;
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (size_t i = 0; i < a.c_.size(); ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }

  /// Euclidean division; throws on division by zero.
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero_poly()) throw std::domain_error("polynomial division by zero");
    if (a.degree() < b.degree()) return {Polynomial(), a};
    std::vector<F> r = a.c_;
    std::vector<F> q(static_cast<size_t>(a.degree() - b.degree() + 1), F(0));
    const F inv_lead = F(1) / b.lead();
    for (int k = a.degree() - b.degree(); k >= 0; --k) {
      const F f = r[static_cast<size_t>(k + b.degree())] * inv_lead;
      q[static_cast<size_t>(k)] = f;
      if (is_zero(f)) continue;
      for (int j = 0; j <= b.degree(); ++j)
        r[static_cast<size_t>(k + j)] = r[static_cast<size_t>(k + j)] - f * b.c_[static_cast<size_t>(j)];
    }
    r.resize(static_cast<size_t>(b.degree()));
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
  }

  Polynomial monic() const {
    if (c_.empty()) return {};
    return scaled(F(1) / lead());
  }
  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<F> c(c_.size() - 1, F(0));
    for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * F(static_cast<long>(i));
    return Polynomial(std::move(c));
  }

  /// Horner evaluation at a value of any ring that F multiplies into.
  template <class R>
  R eval(const R& x) const {
    R acc = R(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + R(c_[static_cast<size_t>(i)]);
    return acc;
  }

 private:
  void trim() {
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }
  std::vector<F> c_;
};

template <class F>
Polynomial<F> gcd(Polynomial<F> a, Polynomial<F> b) {
  while (!b.is_zero_poly()) {
    auto r = Polynomial<F>::divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

using QPoly = Polynomial<mpq_class>;

inline double to_double(const mpq_class& q) { return q.get_d(); }

inline double eval_double(const QPoly& p, double x) {
  double acc = 0.0;
  for (int i = p.degree(); i >= 0; --i) acc = acc * x + p.coeff(i).get_d();
  return acc;
}

/// p(x + shift)
inline QPoly taylor_shift(const QPoly& p, const mpq_class& shift) {
  QPoly lin(std::vector<mpq_class>{shift, mpq_class(1)});
  QPoly acc;
  for (int i = p.degree(); i >= 0; --i) acc = acc * lin + QPoly(p.coeff(i));
  return acc;
}

inline std::string rational_string(const mpq_class& q) { return q.get_str(); }

inline std::string poly_string(const QPoly& p, const std::string& var) {
  if (p.is_zero_poly()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    mpq_class c = p.coeff(i);
    if (is_zero(c)) continue;
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    mpq_class a = abs(c);
    if (i == 0 || a != 1) {
      os << a.get_str();
      if (i > 0) os << "*";
    }
    if (i >= 1) os << var;
    if (i > 1) os << "^" << i;
    first = false;
  }
  return os.str();
}

/// Element of Q(delta): reduced fraction with monic denominator.
class RatFunc {
 public:
  RatFunc() : den_(mpq_class(1)) {}
  RatFunc(long v) : num_(mpq_class(v)), den_(mpq_class(1)) {}  // NOLINT: implicit by design of Polynomial<F>
  RatFunc(const mpq_class& v) : num_(v), den_(mpq_class(1)) {}  // NOLINT
  RatFunc(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RatFunc delta() { return RatFunc(QPoly::variable(), QPoly(mpq_class(1))); }
  /// The loop parameter d = delta^2 - 1.
  static RatFunc loop_d() { return delta() * delta() - RatFunc(1); }

  const QPoly& num() const { return num_; }
  const QPoly& den() const { return den_; }
  bool zero() const { return num_.is_zero_poly(); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.zero()) return b;
    if (b.zero()) return a;
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.zero() || b.zero()) return RatFunc();
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.zero()) throw std::domain_error("RatFunc division by zero");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  RatFunc pow(long k) const {
    if (k < 0) return (RatFunc(1) / *this).pow(-k);
    RatFunc acc(1), base = *this;
    while (k > 0) {
      if (k & 1) acc = acc * base;
      base = base * base;
      k >>= 1;
    }
    return acc;
  }

  double eval(double delta) const { return eval_double(num_, delta) / eval_double(den_, delta); }

  std::optional<mpq_class> eval_exact(const mpq_class& delta) const {
    mpq_class d = den_.eval(delta);
    if (is_zero(d)) return std::nullopt;
    return mpq_class(num_.eval(delta) / d);
  }

  /// True when only even powers of delta occur, i.e. the value lies in Q(d).
  bool is_even() const {
    auto even = [](const QPoly& p) {
      for (int i = 1; i <= p.degree(); i += 2)
        if (!is_zero(p.coeff(i))) return false;
      return true;
    };
    return even(num_) && even(den_);
  }

  /// Exact value at a point given only through delta^2 (needs is_even()).
  std::optional<mpq_class> eval_at_delta_squared(const mpq_class& delta_sq) const {
    if (!is_even()) return std::nullopt;
    auto half = [&](const QPoly& p) {
      mpq_class acc = 0;
      for (int i = p.degree(); i >= 0; i -= 2) {
        acc = acc * delta_sq + p.coeff(i);
      }
      return acc;
    };
    // degree may be odd only if the top coefficient vanishes, which trim excludes
    mpq_class d = half(den_);
    if (is_zero(d)) return std::nullopt;
    return mpq_class(half(num_) / d);
  }

  std::string str() const {
    if (den_.degree() == 0) return poly_string(num_, "delta");
    return "(" + poly_string(num_, "delta") + ")/(" + poly_string(den_, "delta") + ")";
  }

 private:
  void normalize() {
    if (den_.is_zero_poly()) throw std::domain_error("RatFunc with zero denominator");
    if (num_.is_zero_poly()) {
      den_ = QPoly(mpq_class(1));
      return;
    }
    if (den_.degree() > 0) {
      QPoly g = gcd(num_, den_);
      if (g.degree() > 0) {
        num_ = QPoly::divmod(num_, g).first;
        den_ = QPoly::divmod(den_, g).first;
      }
    }
    mpq_class l = den_.lead();
    if (l != 1) {
      mpq_class inv = 1 / l;
      num_ = num_.scaled(inv);
      den_ = den_.scaled(inv);
    }
  }

  QPoly num_;
  QPoly den_;
};

inline bool is_zero(const RatFunc& x) { return x.zero(); }

/// Integer Laurent polynomial in delta: sum of coeff[i] * delta^(low + i).
class Laurent {
 public:
  Laurent() = default;
  Laurent(long v) {  // NOLINT
    if (v != 0) c_.push_back(mpz_class(v));
  }
  static Laurent monomial(long coeff, int power) {
    Laurent l;
    if (coeff != 0) {
      l.low_ = power;
      l.c_.push_back(mpz_class(coeff));
    }
    return l;
  }

  bool zero() const { return c_.empty(); }

  friend Laurent operator+(const Laurent& a, const Laurent& b) {
    if (a.zero()) return b;
    if (b.zero()) return a;
    Laurent r;
    r.low_ = std::min(a.low_, b.low_);
    int high = std::max(a.low_ + static_cast<int>(a.c_.size()), b.low_ + static_cast<int>(b.c_.size()));
    r.c_.assign(static_cast<size_t>(high - r.low_), mpz_class(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r.c_[static_cast<size_t>(a.low_ - r.low_) + i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r.c_[static_cast<size_t>(b.low_ - r.low_) + i] += b.c_[i];
    r.trim();
    return r;
  }
  Laurent operator-() const {
    Laurent r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    if (a.zero() || b.zero()) return {};
    Laurent r;
    r.low_ = a.low_ + b.low_;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, mpz_class(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    r.trim();
    return r;
  }
  friend bool operator==(const Laurent& a, const Laurent& b) { return a.low_ == b.low_ && a.c_ == b.c_; }

  RatFunc to_ratfunc() const {
    if (zero()) return RatFunc();
    std::vector<mpq_class> q;
    for (const auto& z : c_) q.emplace_back(z);
    QPoly body(std::move(q));
    if (low_ >= 0) return RatFunc(body * QPoly::monomial(mpq_class(1), low_), QPoly(mpq_class(1)));
    return RatFunc(body, QPoly::monomial(mpq_class(1), -low_));
  }

  double eval(double delta) const {
    double acc = 0.0;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * delta + c_[i].get_d();
    return acc * std::pow(delta, low_);
  }

 private:
  void trim() {
    size_t first = 0;
    while (first < c_.size() && sgn(c_[first]) == 0) ++first;
    if (first == c_.size()) {
      c_.clear();
      low_ = 0;
      return;
    }
    if (first > 0) {
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(first));
      low_ += static_cast<int>(first);
    }
    while (sgn(c_.back()) == 0) c_.pop_back();
  }

  int low_ = 0;
  std::vector<mpz_class> c_;
};

inline bool is_zero(const Laurent& x) { return x.zero(); }

}  // namespace thompson
