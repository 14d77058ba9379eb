#ifndef PTLAME_FLOQUET_HPP
#define PTLAME_FLOQUET_HPP

// Numerical band structure of -psi'' + V(x) psi = E psi for a complex periodic
// V: one-period monodromy matrix, discriminant Delta(E) = tr M, band-edge
// location, periodicity classes and the Bloch wavenumber.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "ptlame/elliptic.hpp"
#include "ptlame/errors.hpp"
#include "ptlame/potentials.hpp"

namespace ptlame {

struct FloquetOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double x0 = 0.0;
  // |det M - 1| allowed before the run is rejected, relative to the size of
  // the products entering det M once those exceed 1 (deep in a gap)
  double det_tol = 1e-9;
};

using Matrix2 = std::array<std::array<cplx, 2>, 2>;

struct MonodromyResult {
  double energy = 0.0;
  Matrix2 M{};
  cplx discriminant;
  cplx det;
  std::size_t steps = 0;
};

/// Maps (psi(x0), psi'(x0)) to (psi(x0+L), psi'(x0+L)) for
/// -psi'' + V psi = E psi.  The columns are the solutions started from (1,0)
/// and (0,1); both are integrated together so they share potential samples.
/// Throws IntegrationError on failure or when det M drifts from 1.
template <class Potential>
MonodromyResult monodromy(const Potential& V, double L, double E,
                          const FloquetOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<cplx, 4>;
  auto rhs = [&](const State& y, State& dy, double x) {
    const cplx q = V(x) - E;
    dy[0] = y[1];
    dy[1] = q * y[0];
    dy[2] = y[3];
    dy[3] = q * y[2];
  };
  State y{cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)};
  auto stepper = odeint::make_controlled(opt.atol, opt.rtol,
                                         odeint::runge_kutta_fehlberg78<State>());
  MonodromyResult r;
  r.energy = E;
  try {
    r.steps = odeint::integrate_adaptive(stepper, rhs, y, opt.x0, opt.x0 + L, L / 64.0);
  } catch (const PoleError& e) {
    throw IntegrationError(std::string("monodromy: singular potential on the line: ") + e.what());
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("monodromy: integration failed: ") + e.what());
  }
  r.M = {{{y[0], y[2]}, {y[1], y[3]}}};
  r.discriminant = y[0] + y[3];
  r.det = y[0] * y[3] - y[2] * y[1];
  const double scale = std::max(1.0, std::abs(y[0] * y[3]) + std::abs(y[2] * y[1]));
  if (!std::isfinite(std::abs(r.discriminant)) || std::abs(r.det - 1.0) > opt.det_tol * scale) {
    std::ostringstream os;
    os << "monodromy: Wronskian drift |det M - 1| = " << std::abs(r.det - 1.0) << " at E = " << E;
    throw IntegrationError(os.str());
  }
  return r;
}

inline MonodromyResult monodromy(const PotentialSpec& spec, double E,
                                 const FloquetOptions& opt = {}) {
  return monodromy([&spec](double x) { return eval(spec, x); }, spec.period(), E, opt);
}

/// A periodic potential given by a callable and its period.
struct PeriodicPotential {
  std::function<cplx(double)> value;
  double period;
};

inline PeriodicPotential as_periodic(const PotentialSpec& spec) {
  return {[spec](double x) { return eval(spec, x); }, spec.period()};
}

inline MonodromyResult monodromy(const PeriodicPotential& p, double E,
                                 const FloquetOptions& opt = {}) {
  return monodromy(p.value, p.period, E, opt);
}

// ---------------------------------------------------------------------------
// Scans

enum class PeriodClass { P, A };

inline char to_char(PeriodClass c) { return c == PeriodClass::P ? 'P' : 'A'; }

struct ScanEdge {
  double energy;      // linear interpolation between grid points
  int type;           // +2 or -2
  int multiplicity;
};

struct ScanResult {
  std::vector<double> energies;
  std::vector<cplx> discriminants;
  std::vector<std::string> errors;  // empty string where the sample succeeded
  std::vector<ScanEdge> edges_found;
  // gaps narrower than the grid, found by refining extrema of Re Delta that
  // come within the near-touch window of +-2: (location, type)
  std::vector<std::pair<double, int>> narrow_gaps;
  double max_imag = 0.0;
  bool pt_breaking = false;     // some |Im Delta| above the flag threshold
  bool interleaving_ok = true;  // +2 first, then alternating pairs

  /// Finite open gaps: adjacent grid crossings of equal type plus the
  /// narrow gaps.  The region below the ground state is not counted.
  int gap_count() const {
    int gaps = static_cast<int>(narrow_gaps.size());
    for (std::size_t i = 1; i < edges_found.size(); ++i)
      if (edges_found[i].type == edges_found[i - 1].type) ++gaps;
    return gaps;
  }
};

inline constexpr double kNearTouchWindow = 0.05;
inline constexpr double kClosedGapTol = 1e-7;

namespace detail {

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Oscillation order: one +2 edge, then pairs -2,-2,+2,+2,...
inline bool check_interleaving(const std::vector<int>& types_with_multiplicity) {
  for (std::size_t i = 0; i < types_with_multiplicity.size(); ++i) {
    const int expected = ((i + 1) / 2) % 2 == 0 ? 2 : -2;
    if (types_with_multiplicity[i] != expected) return false;
  }
  return true;
}

/// Maximum of s * Re Delta on [lo, hi] by Brent's method: (E*, peak).
template <class F>
std::pair<double, double> refine_extremum(F&& re_delta, double lo, double hi, double s) {
  const auto best = boost::math::tools::brent_find_minima(
      [&](double e) { return -s * re_delta(e); }, lo, hi, 52);
  return {best.first, -best.second};
}

/// Grid indices i where s * f has a local maximum below 2 but within the
/// near-touch window.
inline std::vector<std::size_t> near_touch_extrema(const std::vector<double>& f, double s,
                                                   double window) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double a = s * f[i - 1], b = s * f[i], c = s * f[i + 1];
    if (!(b >= a && b >= c)) continue;
    if (b > 2.0 || a > 2.0 || c > 2.0) continue;
    if (2.0 - b > window) continue;
    out.push_back(i);
  }
  return out;
}

}  // namespace detail

inline ScanResult discriminant_scan(const PeriodicPotential& p, double e_min, double e_max,
                                    std::size_t n, const FloquetOptions& opt = {},
                                    unsigned workers = 1, double imag_flag = 1e-6,
                                    bool refine_narrow = true) {
  if (!(e_min < e_max) || n < 2) throw DomainError("discriminant_scan: need e_min < e_max, n >= 2");
  ScanResult r;
  r.energies.resize(n);
  r.discriminants.assign(n, cplx(std::nan(""), std::nan("")));
  r.errors.assign(n, std::string());
  for (std::size_t i = 0; i < n; ++i)
    r.energies[i] = e_min + (e_max - e_min) * double(i) / double(n - 1);
  detail::parallel_for(n, workers, [&](std::size_t i) {
    try {
      r.discriminants[i] = monodromy(p, r.energies[i], opt).discriminant;
    } catch (const std::exception& e) {
      r.errors[i] = e.what();
    }
  });
  std::vector<int> types;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.errors[i].empty()) continue;
    r.max_imag = std::max(r.max_imag, std::abs(r.discriminants[i].imag()));
  }
  r.pt_breaking = r.max_imag > imag_flag;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!r.errors[i].empty() || !r.errors[i + 1].empty()) continue;
    for (int t : {2, -2}) {
      const double g0 = r.discriminants[i].real() - t;
      const double g1 = r.discriminants[i + 1].real() - t;
      if ((g0 < 0.0) != (g1 < 0.0)) {
        const double e = r.energies[i] + (r.energies[i + 1] - r.energies[i]) * g0 / (g0 - g1);
        r.edges_found.push_back({e, t, 1});
        types.push_back(t);
      }
    }
  }
  r.interleaving_ok = detail::check_interleaving(types);

  bool clean = true;
  for (const auto& e : r.errors) clean = clean && e.empty();
  if (clean && refine_narrow) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = r.discriminants[i].real();
    auto re_delta = [&](double e) { return monodromy(p, e, opt).discriminant.real(); };
    for (int t : {2, -2}) {
      const double s = t > 0 ? 1.0 : -1.0;
      for (std::size_t i : detail::near_touch_extrema(f, s, kNearTouchWindow)) {
        const auto [e_star, peak] =
            detail::refine_extremum(re_delta, r.energies[i - 1], r.energies[i + 1], s);
        if (peak - 2.0 > kClosedGapTol) r.narrow_gaps.push_back({e_star, t});
      }
    }
    std::sort(r.narrow_gaps.begin(), r.narrow_gaps.end());
  }
  return r;
}

inline ScanResult discriminant_scan(const PotentialSpec& spec, double e_min, double e_max,
                                    std::size_t n, const FloquetOptions& opt = {},
                                    unsigned workers = 1) {
  return discriminant_scan(as_periodic(spec), e_min, e_max, n, opt, workers);
}

// ---------------------------------------------------------------------------
// Band edges

struct NumericEdge {
  int index;
  double energy;
  cplx discriminant;
  PeriodClass period_class;
  int multiplicity;  // 2 for a closed (tangential) gap
};

struct EdgeSearchOptions {
  double density = 400.0;          // coarse samples per unit energy
  double root_tol = 1e-10;         // bracket width in E
  double closed_gap_tol = kClosedGapTol;        // |Delta| - 2 at a tangential touch
  double near_touch_window = kNearTouchWindow;  // extrema closer than this to +-2 get refined
  std::optional<int> expected_count;  // simple edges, 2a+1 for the Lame family
  unsigned workers = 1;
  FloquetOptions floquet;
};

struct EdgeSearchResult {
  std::vector<NumericEdge> edges;
  std::vector<std::string> warnings;
  std::size_t samples = 0;

  /// Simple (multiplicity-1) edges: the open-gap band edges.
  std::vector<NumericEdge> simple_edges() const {
    std::vector<NumericEdge> out;
    for (const auto& e : edges)
      if (e.multiplicity == 1) out.push_back(e);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
    return out;
  }

  std::vector<NumericEdge> closed_gaps() const {
    std::vector<NumericEdge> out;
    for (const auto& e : edges)
      if (e.multiplicity == 2) out.push_back(e);
    return out;
  }

  /// Number of open gaps: adjacent simple edges of equal type.
  int open_gap_count() const {
    const auto s = simple_edges();
    int gaps = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].period_class == s[i - 1].period_class) ++gaps;
    return gaps;
  }
};

/// Periodicity class from the discriminant at an edge: +2 -> P, -2 -> A.
/// Throws DomainError when ||Delta| - 2| exceeds tol.
inline PeriodClass classify_periodicity(cplx discriminant, double tol = 1e-6) {
  if (std::abs(std::abs(discriminant) - 2.0) > tol) {
    std::ostringstream os;
    os << "classify_periodicity: ambiguous, Delta = " << discriminant;
    throw DomainError(os.str());
  }
  return discriminant.real() > 0.0 ? PeriodClass::P : PeriodClass::A;
}

inline PeriodClass classify_periodicity(const NumericEdge& edge, double tol = 1e-6) {
  return classify_periodicity(edge.discriminant, tol);
}

/// Locates the roots of Delta(E) -+ 2 in [e_min, e_max]: sign changes on a
/// coarse grid are refined by TOMS 748; discrete extrema of Re Delta near
/// +-2 are refined by Brent's method to catch gaps narrower than the grid
/// and tangential (closed-gap) touches.
inline EdgeSearchResult find_band_edges(const PeriodicPotential& p, double e_min, double e_max,
                                        const EdgeSearchOptions& opt = {}) {
  namespace tools = boost::math::tools;
  const std::size_t n =
      std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(opt.density * (e_max - e_min))) + 1);
  const ScanResult scan = discriminant_scan(p, e_min, e_max, n, opt.floquet, opt.workers,
                                            1e-6, false);
  EdgeSearchResult out;
  out.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!scan.errors[i].empty()) throw IntegrationError(scan.errors[i]);
  }
  auto delta = [&](double e) { return monodromy(p, e, opt.floquet).discriminant; };
  auto re_delta = [&](double e) { return delta(e).real(); };

  struct Raw {
    double energy;
    int type;
    int multiplicity;
  };
  std::vector<Raw> raw;
  auto tol = [&](double a, double b) { return std::abs(b - a) <= opt.root_tol; };
  auto refine_root = [&](double a, double b, double t) {
    std::uintmax_t it = 200;
    const auto g = [&](double e) { return re_delta(e) - t; };
    const auto br = tools::toms748_solve(g, a, b, g(a), g(b), tol, it);
    return 0.5 * (br.first + br.second);
  };

  const auto& E = scan.energies;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = scan.discriminants[i].real();

  for (int t : {2, -2}) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double g0 = f[i] - t, g1 = f[i + 1] - t;
      if (g0 == 0.0) {
        raw.push_back({E[i], t, 1});
      } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
        raw.push_back({refine_root(E[i], E[i + 1], t), t, 1});
      }
    }
    // extrema that approach +-2 from inside the band without crossing on the grid
    const double s = t > 0 ? 1.0 : -1.0;
    for (std::size_t i : detail::near_touch_extrema(f, s, opt.near_touch_window)) {
      const auto [e_star, peak] = detail::refine_extremum(re_delta, E[i - 1], E[i + 1], s);
      if (peak - 2.0 > opt.closed_gap_tol) {
        raw.push_back({refine_root(E[i - 1], e_star, t), t, 1});
        raw.push_back({refine_root(e_star, E[i + 1], t), t, 1});
      } else if (peak - 2.0 >= -opt.closed_gap_tol) {
        raw.push_back({e_star, t, 2});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) { return x.energy < y.energy; });
  for (const Raw& r : raw) {
    const cplx d = delta(r.energy);
    out.edges.push_back({static_cast<int>(out.edges.size()), r.energy, d,
                         r.type > 0 ? PeriodClass::P : PeriodClass::A, r.multiplicity});
  }
  std::vector<int> types;
  for (const auto& e : out.edges)
    for (int k = 0; k < e.multiplicity; ++k) types.push_back(e.period_class == PeriodClass::P ? 2 : -2);
  if (!detail::check_interleaving(types))
    out.warnings.push_back("edge types do not interleave as oscillation theory requires");
  const int simple = static_cast<int>(out.simple_edges().size());
  if (opt.expected_count && simple < *opt.expected_count) {
    std::ostringstream os;
    os << "range too small: found " << simple << " simple edges, expected "
       << *opt.expected_count;
    out.warnings.push_back(os.str());
  }
  return out;
}

/// Default search range [lo, max Re V + a(a+1) m + 5], where lo is one unit
/// below the closed-form ground energy when known, and otherwise
/// min(-1, min Re V - 1).
inline std::pair<double, double> default_energy_range(const PotentialSpec& spec) {
  constexpr int kGrid = 400;
  const double L = spec.period();
  double vmax = -1e300, vmin = 1e300;
  for (int k = 0; k < kGrid; ++k) {
    const double v = eval(spec, L * k / kGrid).real();
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  double lo = std::min(-1.0, vmin - 1.0);
  if (const auto& edges = spec.closed_form_edges(); edges && !edges->empty())
    lo = std::min(-1.0, edges->front().energy - 1.0);
  const double hi = vmax + spec.a() * (spec.a() + 1) * spec.m() + 5.0;
  return {lo, hi};
}

inline EdgeSearchResult find_band_edges(const PotentialSpec& spec, double e_min, double e_max,
                                        EdgeSearchOptions opt = {}) {
  if (!opt.expected_count) opt.expected_count = 2 * spec.a() + 1;
  return find_band_edges(as_periodic(spec), e_min, e_max, opt);
}

inline EdgeSearchResult find_band_edges(const PotentialSpec& spec, EdgeSearchOptions opt = {}) {
  const auto [lo, hi] = default_energy_range(spec);
  return find_band_edges(spec, lo, hi, opt);
}

// ---------------------------------------------------------------------------
// Bloch wavenumber

/// k from cos(kL) = Delta/2.  Inside bands k is real in [0, pi/L]; in gaps
/// Re k is 0 (Delta > 2) or pi/L (Delta < -2) and Im k = arccosh(|Delta|/2)/L.
inline cplx wavenumber_from_discriminant(cplx discriminant, double L, double imag_tol = 1e-7) {
  const cplx half = 0.5 * discriminant;
  if (std::abs(half.imag()) <= imag_tol) {
    const double x = half.real();
    if (x > 1.0) return {0.0, std::acosh(x) / L};
    if (x < -1.0) return {kPi / L, std::acosh(-x) / L};
    return {std::acos(x) / L, 0.0};
  }
  cplx w = std::acos(half);
  if (w.imag() < 0.0) w = -w;  // -k is the same Bloch family
  return w / L;
}

inline cplx dispersion_numeric(const PeriodicPotential& p, double E,
                               const FloquetOptions& opt = {}) {
  return wavenumber_from_discriminant(monodromy(p, E, opt).discriminant, p.period);
}

inline cplx dispersion_numeric(const PotentialSpec& spec, double E,
                               const FloquetOptions& opt = {}) {
  return dispersion_numeric(as_periodic(spec), E, opt);
}

}  // namespace ptlame

#endif  // PTLAME_FLOQUET_HPP
