#ifndef PTLAME_ELLIPTIC_HPP
#define PTLAME_ELLIPTIC_HPP

// Complete elliptic integrals, Jacobi elliptic functions of real and complex
// argument, Jacobi's eta/theta/zeta functions (old notation H, Theta, Z) and
// the descending Landen transformation.  All functions use the parameter
// convention m = k^2.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "ptlame/errors.hpp"
#include "ptlame/jet.hpp"

namespace ptlame {

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Default exclusion radius around poles, in argument space.
inline constexpr double kPoleTol = 1e-6;

namespace detail {

inline void check_parameter(double m, const char* who) {
  if (!(m > 0.0 && m < 1.0)) {
    std::ostringstream os;
    os << who << ": parameter m = " << m << " outside (0,1)";
    throw DomainError(os.str());
  }
}

inline double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 4 * std::numeric_limits<double>::epsilon() * an)
      return 0.5 * (an + bn);
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// K(m) by the arithmetic-geometric mean.  Throws DomainError unless 0<m<1.
inline double complete_K(double m) {
  detail::check_parameter(m, "complete_K");
  return kPi / (2.0 * detail::agm(1.0, std::sqrt(1.0 - m)));
}

/// Elliptic parameter m together with its quarter periods and nome.
class Modulus {
 public:
  explicit Modulus(double m)
      : m_((detail::check_parameter(m, "Modulus"), m)),
        K_(complete_K(m)),
        Kprime_(complete_K(1.0 - m)),
        q_(std::exp(-kPi * Kprime_ / K_)) {}

  double m() const noexcept { return m_; }
  double K() const noexcept { return K_; }
  double Kprime() const noexcept { return Kprime_; }
  double q() const noexcept { return q_; }
  Modulus complementary() const { return Modulus(1.0 - m_); }

 private:
  double m_;
  double K_;
  double Kprime_;
  double q_;
};

struct JacobiValues {
  cplx z;
  cplx sn;
  cplx cn;
  cplx dn;
};

namespace detail {

struct RealSnCnDn {
  double sn, cn, dn;
};

// Descending Landen/AGM recursion with the backward pass in Bulirsch's form
// (one sin/cos, no inverse trigonometric functions).  u is first reduced
// into [-K, K] using sn(u+2K) = -sn u, cn(u+2K) = -cn u.
inline RealSnCnDn sncndn(double u, double m, double K) {
  double sign = 1.0;
  if (std::abs(u) > K) {
    const double n = std::round(u / (2.0 * K));
    u -= 2.0 * K * n;
    if (std::fmod(std::abs(n), 2.0) == 1.0) sign = -1.0;
  }
  constexpr int kMaxLevels = 16;
  // the recursion converges quadratically, so sqrt(eps) closes it
  static const double tol = std::sqrt(std::numeric_limits<double>::epsilon() * 0.01);
  std::array<double, kMaxLevels> am{}, an{};
  double mc = 1.0 - m;
  double a = 1.0, c = 1.0;
  int l = 0;
  for (; l < kMaxLevels; ++l) {
    am[l] = a;
    an[l] = mc = std::sqrt(mc);
    c = 0.5 * (a + mc);
    if (!(std::abs(a - mc) > tol * a)) {
      ++l;
      break;
    }
    mc *= a;
    a = c;
  }
  u *= c;
  double sn = std::sin(u), cn = std::cos(u), dn = 1.0;
  if (sn != 0.0) {
    double r = cn / sn;
    c *= r;
    while (l--) {
      const double b = am[l];
      r *= c;
      c *= dn;
      dn = (an[l] + r) / (b + r);
      r = c / b;
    }
    r = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn < 0.0 ? -r : r;
    cn = c * sn;
  }
  return {sign * sn, sign * cn, dn};
}

}  // namespace detail

/// Real-argument sn, cn, dn.
inline JacobiValues jacobi_real(double u, const Modulus& mod) {
  const auto r = detail::sncndn(u, mod.m(), mod.K());
  return {cplx(u), r.sn, r.cn, r.dn};
}

inline JacobiValues jacobi_real(double u, double m) {
  return jacobi_real(u, Modulus(m));
}

/// Nearest pole of sn/cn/dn: the lattice 2nK + i(2n'+1)K'.
inline cplx nearest_pole(cplx z, const Modulus& mod) {
  const double K = mod.K(), Kp = mod.Kprime();
  const double n = std::round(z.real() / (2.0 * K));
  const double np = std::round((z.imag() - Kp) / (2.0 * Kp));
  return {2.0 * K * n, (2.0 * np + 1.0) * Kp};
}

/// Complex-argument sn, cn, dn through the imaginary-argument addition
/// formulas: real-argument functions of Re z (parameter m) and of Im z
/// (parameter 1-m) combined algebraically.  Throws PoleError within
/// `pole_tol` of a pole.
inline JacobiValues jacobi_complex(cplx z, const Modulus& mod,
                                   double pole_tol = kPoleTol) {
  const cplx pole = nearest_pole(z, mod);
  if (std::abs(z - pole) < pole_tol) {
    std::ostringstream os;
    os << "jacobi_complex: z = " << z << " within " << pole_tol
       << " of pole " << pole;
    throw PoleError(os.str(), pole);
  }
  const double m = mod.m();
  const auto r = detail::sncndn(z.real(), m, mod.K());
  const auto i = detail::sncndn(z.imag(), 1.0 - m, mod.Kprime());
  const double s = r.sn, c = r.cn, d = r.dn;
  const double s1 = i.sn, c1 = i.cn, d1 = i.dn;
  const double den = c1 * c1 + m * s * s * s1 * s1;
  return {z, cplx(s * d1, c * d * s1 * c1) / den,
          cplx(c * c1, -s * d * s1 * d1) / den,
          cplx(d * c1 * d1, -m * s * c * s1) / den};
}

inline JacobiValues jacobi_complex(cplx z, double m) {
  return jacobi_complex(z, Modulus(m));
}

struct JacobiJets {
  Jet sn, cn, dn;
};

/// sn, cn, dn of a jet argument z(h).  Higher Taylor coefficients come from
/// the defining system sn' = cn dn, cn' = -sn dn, dn' = -m sn cn composed
/// with z'(h).
inline JacobiJets jacobi(const Jet& z, const Modulus& mod,
                         double pole_tol = kPoleTol) {
  const auto v = jacobi_complex(z.value(), mod, pole_tol);
  const int n = z.order();
  const double m = mod.m();
  JacobiJets r{Jet::zero(n), Jet::zero(n), Jet::zero(n)};
  r.sn.coeff(0) = v.sn;
  r.cn.coeff(0) = v.cn;
  r.dn.coeff(0) = v.dn;
  std::array<cplx, Jet::kMaxOrder + 1> cd{}, sd{}, sc{};
  for (int k = 0; k < n; ++k) {
    cplx a{}, b{}, c{};
    for (int j = 0; j <= k; ++j) {
      a += r.cn[j] * r.dn[k - j];
      b += r.sn[j] * r.dn[k - j];
      c += r.sn[j] * r.cn[k - j];
    }
    cd[k] = a;
    sd[k] = b;
    sc[k] = c;
    cplx ps{}, pc{}, pd{};
    for (int j = 0; j <= k; ++j) {
      const cplx zp = double(k - j + 1) * z[k - j + 1];
      ps += cd[j] * zp;
      pc += sd[j] * zp;
      pd += sc[j] * zp;
    }
    r.sn.coeff(k + 1) = ps / double(k + 1);
    r.cn.coeff(k + 1) = -pc / double(k + 1);
    r.dn.coeff(k + 1) = -m * pd / double(k + 1);
  }
  return r;
}

/// Jacobi's eta and theta functions H(u), Theta(u) for a fixed modulus,
/// summed as q-series in v = pi u / (2K):
///   H(u)     = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) v)
///   Theta(u) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2} cos(2 n v)
/// Summation stops once a term falls below 1e-16 of the partial sum and the
/// terms are decreasing.  Immutable; safe to share between threads.
class ThetaBundle {
 public:
  static constexpr double kRelTol = 1e-16;
  static constexpr int kMaxTerms = 200;

  explicit ThetaBundle(const Modulus& mod) : mod_(mod), log_q_(std::log(mod.q())) {
    // terms needed on the real axis: q^{n^2} < kRelTol
    truncation_ = 1;
    while (truncation_ < kMaxTerms &&
           std::exp(truncation_ * truncation_ * log_q_) >= kRelTol)
      ++truncation_;
  }

  const Modulus& modulus() const noexcept { return mod_; }
  /// Number of series terms used for real arguments.
  int truncation() const noexcept { return truncation_; }

  template <class T>
  std::pair<T, T> eval(const T& u) const {
    const T v = u * (kPi / (2.0 * mod_.K()));
    const double imag_v = std::abs(value_of(v).imag());
    T H = T(0.0);
    T Th = T(1.0);
    bool eta_done = false, theta_done = false;
    for (int n = 0; n < kMaxTerms && !(eta_done && theta_done); ++n) {
      // terms grow like exp((2n+1)|Im v|) until q^{n^2} wins
      const bool decreasing = (2.0 * n + 1.0) * (-log_q_) > 2.0 * imag_v;
      const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
      if (!eta_done) {
        const double w = (n + 0.5) * (n + 0.5) * log_q_;
        const T term = 2.0 * sgn * std::exp(w) * sin(v * double(2 * n + 1));
        H += term;
        if (decreasing && magnitude(term) < kRelTol * magnitude(H)) eta_done = true;
      }
      if (!theta_done && n >= 1) {
        const double w = double(n) * n * log_q_;
        const T term = 2.0 * sgn * std::exp(w) * cos(v * double(2 * n));
        Th += term;
        if (decreasing && magnitude(term) < kRelTol * magnitude(Th)) theta_done = true;
      }
    }
    return {H, Th};
  }

 private:
  static cplx sin(cplx v) { return std::sin(v); }
  static cplx cos(cplx v) { return std::cos(v); }
  static Jet sin(const Jet& v) { return ptlame::sin(v); }
  static Jet cos(const Jet& v) { return ptlame::cos(v); }

  Modulus mod_;
  double log_q_;
  int truncation_;
};

struct EtaTheta {
  cplx H;
  cplx Theta;
};

inline EtaTheta theta_functions(const ThetaBundle& bundle, cplx u) {
  const auto [H, Th] = bundle.eval(u);
  return {H, Th};
}

/// Jet version: derivatives of H and Theta from the termwise-differentiated
/// series.
inline std::pair<Jet, Jet> theta_functions(const ThetaBundle& bundle, const Jet& u) {
  return bundle.eval(u);
}

/// Jacobi zeta Z(u) = Theta'(u) / Theta(u).  Throws PoleError near a zero of
/// Theta (the points iK' + 2nK + 2n'iK').
inline cplx zeta_Z(const ThetaBundle& bundle, cplx u, double zero_tol = kPoleTol) {
  const Modulus& mod = bundle.modulus();
  const cplx zero = nearest_pole(u, mod);
  if (std::abs(u - zero) < zero_tol) {
    std::ostringstream os;
    os << "zeta_Z: u = " << u << " too close to theta zero " << zero;
    throw PoleError(os.str(), zero);
  }
  const auto [H, Th] = bundle.eval(Jet::variable(u, 1));
  return Th[1] / Th[0];
}

namespace detail {

// Carlson's symmetric integral R_F by duplication; complex arguments on the
// principal branch.
inline cplx carlson_rf(cplx x, cplx y, cplx z) {
  for (int i = 0; i < 100; ++i) {
    const cplx A = (x + y + z) / 3.0;
    const double r = std::max({std::abs(A - x), std::abs(A - y), std::abs(A - z)});
    if (r < 1e-4 * std::abs(A) || std::abs(A) == 0.0) {
      const cplx X = 1.0 - x / A, Y = 1.0 - y / A;
      const cplx Z = -(X + Y);
      const cplx E2 = X * Y - Z * Z, E3 = X * Y * Z;
      return (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0) /
             std::sqrt(A);
    }
    const cplx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const cplx lam = sx * sy + sy * sz + sz * sx;
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
  }
  return cplx(std::numeric_limits<double>::quiet_NaN());
}

inline bool in_rect(cplx a, double K, double Kp, double slack, bool upper) {
  const bool re_ok = a.real() >= -K - slack && a.real() <= K + slack;
  const bool im_ok = upper ? (a.imag() >= -slack && a.imag() <= Kp + slack)
                           : (a.imag() >= -Kp - slack && a.imag() <= slack);
  return re_ok && im_ok;
}

}  // namespace detail

/// Inverse of sn: returns alpha with sn(alpha, m) = w.  The representative
/// lies in the rectangle -K <= Re alpha <= K, 0 <= Im alpha <= K' (the
/// conformal preimage of the closed upper half plane); for Im w < 0 it lies
/// in the mirrored rectangle -K' <= Im alpha < 0.  Newton refinement on
/// sn(alpha) - w, seeded by the incomplete integral F(asin w | m).
inline cplx inverse_sn(cplx w, const Modulus& mod, int max_iter = 50) {
  const double K = mod.K(), Kp = mod.Kprime();
  const double scale = std::max(1.0, std::abs(w));
  const double m = mod.m();

  auto newton = [&](cplx a) -> std::pair<cplx, bool> {
    for (int it = 0; it < max_iter; ++it) {
      JacobiValues j;
      try {
        j = jacobi_complex(a, mod, 1e-8);
      } catch (const PoleError&) {
        return {a, false};
      }
      const cplx f = j.sn - w;
      if (std::abs(f) <= 1e-15 * scale) return {a, true};
      const cplx df = j.cn * j.dn;
      if (std::abs(df) < 1e-300) break;
      cplx step = f / df;
      // keep the update bounded by a fraction of the period rectangle
      const double lim = 0.5 * std::min(K, Kp);
      if (std::abs(step) > lim) step *= lim / std::abs(step);
      a -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(a))) {
        const auto jj = jacobi_complex(a, mod, 1e-8);
        return {a, std::abs(jj.sn - w) <= 1e-11 * scale};
      }
    }
    try {
      const auto jj = jacobi_complex(a, mod, 1e-8);
      return {a, std::abs(jj.sn - w) <= 1e-11 * scale};
    } catch (const PoleError&) {
      return {a, false};
    }
  };

  std::array<cplx, 6> seeds{w * detail::carlson_rf(1.0 - w * w, 1.0 - m * w * w, 1.0),
                            cplx(K, 0.5 * Kp),
                            cplx(0.0, 0.5 * Kp),
                            cplx(-K, 0.5 * Kp),
                            cplx(0.5 * K, 0.9 * Kp),
                            cplx(-0.5 * K, 0.9 * Kp)};
  cplx alpha{};
  bool ok = false;
  for (const cplx& s : seeds) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) continue;
    auto [a, good] = newton(s);
    if (good) {
      alpha = a;
      ok = true;
      break;
    }
  }
  if (!ok) {
    std::ostringstream os;
    os << "inverse_sn: Newton did not converge for w = " << w;
    throw ConvergenceError(os.str());
  }

  // Preimages of w: alpha and 2K - alpha, modulo (4K, 2iK').
  const bool upper = w.imag() >= 0.0;
  const double slack = 1e-9 * std::max(K, Kp);
  for (const cplx base : {alpha, cplx(2.0 * K) - alpha}) {
    const double nr = std::round(base.real() / (4.0 * K));
    const double ni = std::floor(base.imag() / (2.0 * Kp));
    for (int dr = -1; dr <= 1; ++dr) {
      for (int di = -1; di <= 1; ++di) {
        const cplx cand =
            base - cplx(4.0 * K * (nr + dr), 2.0 * Kp * (ni + di));
        if (detail::in_rect(cand, K, Kp, slack, upper)) {
          return {std::clamp(cand.real(), -K, K),
                  upper ? std::clamp(cand.imag(), 0.0, Kp)
                        : std::clamp(cand.imag(), -Kp, 0.0)};
        }
      }
    }
  }
  return alpha;
}

inline cplx inverse_sn(cplx w, double m) { return inverse_sn(w, Modulus(m)); }

struct LandenPair {
  double alpha;
  double m_tilde;
};

/// Descending Landen transformation:
///   dn(x,m) + dn(x+K,m) = dn(x/alpha, m~) / alpha,
///   alpha = 1/(1+sqrt(1-m)),  m~ = ((1-sqrt(1-m))/(1+sqrt(1-m)))^2.
inline LandenPair landen_descend(double m) {
  detail::check_parameter(m, "landen_descend");
  const double kp = std::sqrt(1.0 - m);
  // (1-k')/(1+k') written without cancellation
  const double ratio = m / ((1.0 + kp) * (1.0 + kp));
  return {1.0 / (1.0 + kp), ratio * ratio};
}

}  // namespace ptlame

#endif  // PTLAME_ELLIPTIC_HPP
