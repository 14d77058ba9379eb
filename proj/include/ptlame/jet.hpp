#ifndef PTLAME_JET_HPP
#define PTLAME_JET_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>

namespace ptlame {

using cplx = std::complex<double>;

/// Truncated Taylor series in one complex variable t around an expansion
/// point, with complex coefficients: f(t0 + h) = sum_k c[k] h^k.
///
/// Arithmetic propagates derivatives exactly (forward-mode, any order up to
/// kMaxOrder), which is how every derivative in this library is obtained:
/// W' in superpotentials, psi'' in eigenfunction residuals and the
/// termwise-differentiated theta series.  A jet built from a plain scalar
/// is a constant of maximal order so it never truncates its partner.
class Jet {
 public:
  static constexpr int kMaxOrder = 11;

  Jet() : order_(kMaxOrder) {}
  Jet(cplx value) : order_(kMaxOrder) { c_[0] = value; }  // NOLINT
  Jet(double value) : order_(kMaxOrder) { c_[0] = value; }  // NOLINT

  /// The independent variable t expanded at x0, truncated at `order`.
  static Jet variable(cplx x0, int order) {
    assert(order >= 0 && order <= kMaxOrder);
    Jet j;
    j.order_ = order;
    j.c_[0] = x0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  static Jet zero(int order) {
    Jet j;
    j.order_ = order;
    return j;
  }

  int order() const noexcept { return order_; }
  cplx value() const noexcept { return c_[0]; }
  cplx operator[](int k) const noexcept { return k <= order_ ? c_[k] : cplx{}; }
  cplx& coeff(int k) noexcept { return c_[k]; }

  /// k-th derivative d^k f / dt^k at the expansion point.
  cplx derivative(int k) const {
    assert(k <= order_);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c_[k] * fact;
  }

  /// The jet of f'(t), one order lower.
  Jet differentiated() const {
    assert(order_ >= 1);
    Jet r = zero(order_ - 1);
    for (int k = 0; k < order_; ++k) r.c_[k] = c_[k + 1] * double(k + 1);
    return r;
  }

  Jet truncated(int order) const {
    Jet r = *this;
    r.order_ = std::min(order_, order);
    for (int k = r.order_ + 1; k <= kMaxOrder; ++k) r.c_[k] = 0.0;
    return r;
  }

  /// Largest coefficient magnitude (used for series truncation tests).
  double magnitude() const {
    double mx = 0.0;
    for (int k = 0; k <= order_; ++k) mx = std::max(mx, std::abs(c_[k]));
    return mx;
  }

  Jet operator-() const {
    Jet r = *this;
    for (int k = 0; k <= order_; ++k) r.c_[k] = -c_[k];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    for (int k = order_ + 1; k <= kMaxOrder; ++k) c_[k] = 0.0;
    return *this;
  }
  Jet& operator-=(const Jet& o) { return *this += -o; }

  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r = zero(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
      cplx s{};
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r = zero(std::min(a.order_, b.order_));
    const cplx b0 = b.c_[0];
    for (int k = 0; k <= r.order_; ++k) {
      cplx s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b0;
    }
    return r;
  }

  friend Jet operator*(const Jet& a, cplx s) {
    Jet r = a;
    for (int k = 0; k <= r.order_; ++k) r.c_[k] *= s;
    return r;
  }
  friend Jet operator*(cplx s, const Jet& a) { return a * s; }
  friend Jet operator*(const Jet& a, double s) { return a * cplx(s); }
  friend Jet operator*(double s, const Jet& a) { return a * cplx(s); }
  friend Jet operator/(const Jet& a, cplx s) { return a * (1.0 / s); }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

 private:
  std::array<cplx, kMaxOrder + 1> c_{};
  int order_;
};

inline Jet sqr(const Jet& a) { return a * a; }

inline Jet exp(const Jet& f) {
  Jet e = Jet::zero(f.order());
  e.coeff(0) = std::exp(f.value());
  for (int k = 1; k <= f.order(); ++k) {
    cplx s{};
    for (int j = 1; j <= k; ++j) s += double(j) * f[j] * e[k - j];
    e.coeff(k) = s / double(k);
  }
  return e;
}

namespace detail {

inline void sincos_jet(const Jet& f, Jet& s, Jet& c) {
  s = Jet::zero(f.order());
  c = Jet::zero(f.order());
  s.coeff(0) = std::sin(f.value());
  c.coeff(0) = std::cos(f.value());
  for (int k = 1; k <= f.order(); ++k) {
    cplx ss{}, cc{};
    for (int j = 1; j <= k; ++j) {
      ss += double(j) * f[j] * c[k - j];
      cc -= double(j) * f[j] * s[k - j];
    }
    s.coeff(k) = ss / double(k);
    c.coeff(k) = cc / double(k);
  }
}

}  // namespace detail

inline Jet sin(const Jet& f) {
  Jet s, c;
  detail::sincos_jet(f, s, c);
  return s;
}

inline Jet cos(const Jet& f) {
  Jet s, c;
  detail::sincos_jet(f, s, c);
  return c;
}

/// Evaluates the series `outer` (a jet in its own variable, expanded at
/// inner.value()) at the point described by `inner`: returns the jet of
/// outer(inner(h)).  The constant term of inner is the expansion point.
inline Jet compose(const Jet& outer, const Jet& inner) {
  const int order = std::min(outer.order(), inner.order());
  Jet delta = inner.truncated(order);
  delta.coeff(0) = 0.0;
  Jet r = Jet::zero(order);
  r.coeff(0) = outer[order];
  for (int k = order - 1; k >= 0; --k) {
    r = r * delta;
    r.coeff(0) += outer[k];
  }
  return r;
}

/// Applies `f` in the local variable of `z`: f receives the identity jet of
/// order z.order() + extra at z.value() and must return a series of at least
/// order z.order(); the result is composed back onto z.  This lets f take
/// derivatives with respect to its own argument (consuming `extra` orders).
template <class F>
Jet in_local_variable(const Jet& z, int extra, F&& f) {
  const int local_order = std::min(z.order() + extra, Jet::kMaxOrder);
  const Jet t = Jet::variable(z.value(), local_order);
  const Jet series = f(t);
  if (z.order() == 0) return series.truncated(0);
  return compose(series.truncated(z.order()), z);
}

inline double magnitude(cplx v) { return std::abs(v); }
inline double magnitude(const Jet& v) { return v.magnitude(); }
inline cplx value_of(cplx v) { return v; }
inline cplx value_of(const Jet& v) { return v.value(); }

}  // namespace ptlame

#endif  // PTLAME_JET_HPP
