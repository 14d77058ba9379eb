#ifndef PTLAME_SPECTRA_HPP
#define PTLAME_SPECTRA_HPP

// Closed-form band edges of the ground-zeroed PT-transformed potentials,
// the energy maps relating PT/real/dual-modulus spectra, and the analytic
// a = 1 dispersion relation built from Jacobi's eta, theta and zeta.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ptlame/closed_forms.hpp"
#include "ptlame/elliptic.hpp"
#include "ptlame/floquet.hpp"
#include "ptlame/potentials.hpp"

namespace ptlame {

/// One band edge: energy, periodicity class over the potential's period L
/// (P: psi(x+L) = psi(x), A: psi(x+L) = -psi(x)) and the eigenfunction,
/// normalised so that max |psi| = 1 over one period.
struct BandEdge {
  int index = 0;
  double energy = 0.0;
  PeriodClass period_class = PeriodClass::P;
  std::function<Jet(const Jet&)> form;  // unnormalised, as a function of x
  double norm = 1.0;
  bool gap_closed = false;  // degenerate with a neighbour

  cplx eigenfunction(double x) const { return form(Jet::variable(x, 0)).value() / norm; }
  Jet eigenfunction_jet(const Jet& x) const { return form(x) / norm; }
};

namespace detail {

inline constexpr int kNormSamples = 256;

inline double max_abs_over_period(const std::function<Jet(const Jet&)>& f, double L) {
  double mx = 0.0;
  for (int k = 0; k < kNormSamples; ++k)
    mx = std::max(mx, std::abs(f(Jet::variable(L * k / kNormSamples, 0)).value()));
  return mx;
}

/// psi(x0+L)/psi(x0) at the sample point where |psi| is largest.
inline PeriodClass classify_form(const std::function<Jet(const Jet&)>& f, double L) {
  double best = -1.0, x_best = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double x = L * (k + 0.37) / 64.0;
    const double v = std::abs(f(Jet::variable(x, 0)).value());
    if (v > best) {
      best = v;
      x_best = x;
    }
  }
  const cplx ratio =
      f(Jet::variable(x_best + L, 0)).value() / f(Jet::variable(x_best, 0)).value();
  return ratio.real() > 0.0 ? PeriodClass::P : PeriodClass::A;
}

struct Row {
  double energy;
  std::function<Jet(const Jet&)> form_of_z;  // as a function of z = i x + beta
  PeriodClass period_class;
};

inline std::vector<BandEdge> finish_edges(const std::vector<Row>& rows, double beta, double L) {
  std::vector<BandEdge> out;
  for (const Row& r : rows) {
    BandEdge e;
    e.energy = r.energy;
    e.period_class = r.period_class;
    auto f = r.form_of_z;
    e.form = [f, beta](const Jet& x) { return f(x * kI + beta); };
    e.norm = max_abs_over_period(e.form, L);
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BandEdge& a, const BandEdge& b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].index = static_cast<int>(i);
    const bool lo = i > 0 && std::abs(out[i].energy - out[i - 1].energy) < 1e-12;
    const bool hi = i + 1 < out.size() && std::abs(out[i].energy - out[i + 1].energy) < 1e-12;
    out[i].gap_closed = lo || hi;
  }
  return out;
}

}  // namespace detail

/// Ground energy E_g of -a(a+1) m sn^2(ix+beta) [- b(b+1) m cn^2/dn^2].
inline double pt_ground_energy(int a, int b, double m) {
  const EdgeConstants d(m);
  if (b == 0 && a == 1) return -1.0 - m;
  if (b == 0 && a == 3) return -5.0 - 5.0 * m - 2.0 * d.delta3;
  if (a == 2 && b == 1) return -5.0 - m - 2.0 * d.root43;
  throw SpecError("pt_ground_energy: no closed form for this (a, b)");
}

/// The three edges of [V^PT]_- = -2m sn^2(ix+beta) + 1 + m: energies 0, m, 1
/// with eigenfunctions sn, cn, dn of ix+beta.  Period classes are read off
/// the eigenfunctions themselves.
inline std::vector<BandEdge> lame_pt_edges_a1(double m, double beta) {
  const Modulus mod(m);
  const double L = 2.0 * mod.Kprime();
  std::vector<detail::Row> rows{
      {0.0, [mod](const Jet& z) { return jacobi(z, mod).sn; }, PeriodClass::P},
      {m, [mod](const Jet& z) { return jacobi(z, mod).cn; }, PeriodClass::P},
      {1.0, [mod](const Jet& z) { return jacobi(z, mod).dn; }, PeriodClass::P},
  };
  for (auto& r : rows) {
    auto f = r.form_of_z;
    r.period_class = detail::classify_form([f, beta](const Jet& x) { return f(x * kI + beta); }, L);
  }
  return detail::finish_edges(rows, beta, L);
}

/// The seven edges of [V^PT]_- = -12 m sn^2(ix+beta) - E_g,
/// E_g = -5 - 5m - 2 delta3.
inline std::vector<BandEdge> lame_pt_edges_a3(double m, double beta) {
  const Modulus mod(m);
  const EdgeConstants d(m);
  const double d1 = d.delta1, d2 = d.delta2, d3 = d.delta3;
  auto poly = [mod, m](int which, double c) {
    return [mod, m, which, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      const Jet lead = which == 0 ? j.sn : which == 1 ? j.cn : j.dn;
      return lead * (c - 5.0 * m * sqr(j.sn));
    };
  };
  using PC = PeriodClass;
  const std::vector<detail::Row> rows{
      {0.0, poly(0, 2.0 + 2.0 * m - d3), PC::P},
      {3.0 * m + 2.0 * d3 - 2.0 * d2, poly(1, 2.0 + m - d2), PC::A},
      {3.0 + 2.0 * d3 - 2.0 * d1, poly(2, 1.0 + 2.0 * m - d1), PC::A},
      {1.0 + m + 2.0 * d3,
       [mod](const Jet& z) {
         const auto j = jacobi(z, mod);
         return j.sn * j.cn * j.dn;
       },
       PC::P},
      {4.0 * d3, poly(0, 2.0 + 2.0 * m + d3), PC::P},
      {3.0 * m + 2.0 * d3 + 2.0 * d2, poly(1, 2.0 + m + d2), PC::A},
      {3.0 + 2.0 * d3 + 2.0 * d1, poly(2, 1.0 + 2.0 * m + d1), PC::A},
  };
  return detail::finish_edges(rows, beta, 2.0 * mod.Kprime());
}

/// The five edges of the ground-zeroed PT associated Lame (2,1) potential
/// -6m sn^2 - 2m cn^2/dn^2 - E_g, E_g = -5 - m - 2 sqrt(4-3m).
inline std::vector<BandEdge> assoc_pt_edges_21(double m, double beta) {
  const Modulus mod(m);
  const EdgeConstants d(m);
  const double s = d.root43, d4 = d.delta4;
  auto cd = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.cn / j.dn * (3.0 * m * sqr(j.sn) + c);
    };
  };
  auto sd = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.sn / j.dn * (3.0 * m * sqr(j.sn) + c);
    };
  };
  using PC = PeriodClass;
  const std::vector<detail::Row> rows{
      {0.0, cd(-2.0 + s), PC::P},
      {2.0 * s - m - 2.0 * d4, sd(-2.0 - m + d4), PC::A},
      {2.0 * s - m + 2.0 * d4, sd(-2.0 - m - d4), PC::A},
      {4.0 * s, cd(-2.0 - s), PC::P},
      {5.0 - 3.0 * m + 2.0 * s, [mod](const Jet& z) { return sqr(jacobi(z, mod).dn); }, PC::P},
  };
  return detail::finish_edges(rows, beta, 2.0 * mod.Kprime());
}

/// Band edges of any spec with closed-form edges (e.g. SUSY partners), with
/// classes read off the eigenfunctions.
inline std::vector<BandEdge> closed_form_band_edges(const PotentialSpec& spec) {
  const auto& forms = spec.closed_form_edges();
  if (!forms) throw SpecError("closed_form_band_edges: none for " + spec.describe());
  const double L = spec.period();
  std::vector<BandEdge> out;
  for (const EdgeForm& f : *forms) {
    BandEdge e;
    e.energy = f.energy;
    e.form = f.psi;
    e.norm = detail::max_abs_over_period(e.form, L);
    e.period_class = detail::classify_form(e.form, L);
    out.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
  return out;
}

// ---------------------------------------------------------------------------
// Residuals and periodicity of eigenfunctions

/// max |-psi'' + V psi - E psi| / max |V psi| over n points of one period.
inline double eigen_residual(const BandEdge& edge, const PotentialSpec& spec, int n = 40) {
  const double L = spec.period();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = L * (k + 0.5) / n;
    const Jet psi = edge.eigenfunction_jet(Jet::variable(x, 2));
    const cplx v = eval(spec, x);
    const cplx vpsi = v * psi.value();
    num = std::max(num, std::abs(-psi.derivative(2) + vpsi - edge.energy * psi.value()));
    den = std::max(den, std::abs(vpsi));
  }
  return num / den;
}

/// max |psi(x+L) -+ psi(x)| for the edge's class, over n points.
inline double periodicity_defect(const BandEdge& edge, double L, int n = 40) {
  const double sgn = edge.period_class == PeriodClass::P ? 1.0 : -1.0;
  double mx = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = L * (k + 0.25) / n;
    mx = std::max(mx, std::abs(edge.eigenfunction(x + L) - sgn * edge.eigenfunction(x)));
  }
  return mx;
}

// ---------------------------------------------------------------------------
// Energy maps and duality relations

/// Anti-isospectral map: E^PT_j = -E_{2a-j}.
inline std::vector<double> pt_energy_map(const std::vector<double>& lame_edges, int a) {
  if (static_cast<int>(lame_edges.size()) != 2 * a + 1) {
    std::ostringstream os;
    os << "pt_energy_map: expected " << 2 * a + 1 << " edges, got " << lame_edges.size();
    throw DomainError(os.str());
  }
  std::vector<double> out(lame_edges.rbegin(), lame_edges.rend());
  for (double& e : out) e = -e;
  return out;
}

enum class EdgeSource { ClosedForm, Floquet };

/// Coarse-scan settings used by the duality checks when Floquet edges are
/// requested.
inline EdgeSearchOptions duality_search_options() {
  EdgeSearchOptions o;
  o.density = 200.0;
  return o;
}

/// Band-edge energies of the real Lame potential a(a+1) m sn^2(x).  All
/// lie in [0, a(a+1)], which bounds the Floquet search.
inline std::vector<double> lame_edge_energies(int a, double m, EdgeSource source,
                                              const EdgeSearchOptions& opt = duality_search_options()) {
  const auto spec = PotentialSpec::lame(a, m);
  std::vector<double> out;
  if (source == EdgeSource::ClosedForm) {
    const auto& forms = spec.closed_form_edges();
    if (!forms) throw SpecError("lame_edge_energies: no closed form for this a");
    for (const auto& f : *forms) out.push_back(f.energy);
    return out;
  }
  const auto r = find_band_edges(spec, -0.5, a * (a + 1) + 0.5, opt);
  for (const auto& e : r.simple_edges()) out.push_back(e.energy);
  return out;
}

/// Band-edge energies of the unshifted PT Lame potential -a(a+1) m sn^2(ix+beta).
inline std::vector<double> pt_lame_edge_energies(int a, double m, double beta, EdgeSource source,
                                                 const EdgeSearchOptions& opt = duality_search_options()) {
  const auto spec = pt_transform(PotentialSpec::lame(a, m), beta);
  std::vector<double> out;
  if (source == EdgeSource::ClosedForm) {
    const auto& forms = spec.closed_form_edges();
    if (!forms) throw SpecError("pt_lame_edge_energies: no closed form for this a");
    for (const auto& f : *forms) out.push_back(f.energy);
    return out;
  }
  const double n = a * (a + 1);
  const auto r = find_band_edges(spec, -n - 0.5, 0.5, opt);
  for (const auto& e : r.simple_edges()) out.push_back(e.energy);
  return out;
}

struct DualityReport {
  std::string relation;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline DualityReport compare(std::string relation, std::vector<double> lhs,
                             std::vector<double> rhs, double tol) {
  DualityReport r{std::move(relation), std::move(lhs), std::move(rhs), 0.0, tol, false};
  if (r.lhs.size() != r.rhs.size() || r.lhs.empty()) {
    r.max_violation = std::numeric_limits<double>::infinity();
    return r;
  }
  for (std::size_t j = 0; j < r.lhs.size(); ++j)
    r.max_violation = std::max(r.max_violation, std::abs(r.lhs[j] - r.rhs[j]));
  r.pass = r.max_violation < tol;
  return r;
}

inline double default_tol(EdgeSource s) { return s == EdgeSource::ClosedForm ? 1e-8 : 1e-6; }

}  // namespace detail

/// E_j(m) = a(a+1) - E_{2a-j}(1-m) for the real Lame edges.
inline DualityReport modulus_duality_check(int a, double m, EdgeSource source,
                                           const EdgeSearchOptions& opt = duality_search_options()) {
  const auto here = lame_edge_energies(a, m, source, opt);
  const auto dual = lame_edge_energies(a, 1.0 - m, source, opt);
  std::vector<double> rhs;
  for (auto it = dual.rbegin(); it != dual.rend(); ++it) rhs.push_back(a * (a + 1) - *it);
  std::ostringstream os;
  os << "E_j(m) = a(a+1) - E_{2a-j}(1-m), a=" << a << ", m=" << m;
  return detail::compare(os.str(), here, rhs, detail::default_tol(source));
}

/// At m = 1/2: E_j + E_{2a-j} = a(a+1) for every j, including E_a = a(a+1)/2.
inline DualityReport half_modulus_sum_rule(int a, EdgeSource source,
                                           const EdgeSearchOptions& opt = duality_search_options()) {
  const auto e = lame_edge_energies(a, 0.5, source, opt);
  std::vector<double> lhs, rhs;
  if (static_cast<int>(e.size()) == 2 * a + 1) {
    for (int j = 0; j <= 2 * a; ++j) {
      lhs.push_back(e[j] + e[2 * a - j]);
      rhs.push_back(a * (a + 1));
    }
    lhs.push_back(e[a]);
    rhs.push_back(0.5 * a * (a + 1));
  }
  std::ostringstream os;
  os << "E_j + E_{2a-j} = a(a+1), E_a = a(a+1)/2 at m=1/2, a=" << a;
  return detail::compare(os.str(), lhs, rhs, detail::default_tol(source));
}

/// E^PT_j(m) = E_j(1-m) - a(a+1) for the unshifted PT Lame potential.
inline DualityReport pt_duality_check(int a, double m, double beta, EdgeSource source,
                                      const EdgeSearchOptions& opt = duality_search_options()) {
  const auto pt = pt_lame_edge_energies(a, m, beta, source, opt);
  auto rhs = lame_edge_energies(a, 1.0 - m, source, opt);
  for (double& e : rhs) e -= a * (a + 1);
  std::ostringstream os;
  os << "E^PT_j(m) = E_j(1-m) - a(a+1), a=" << a << ", m=" << m;
  return detail::compare(os.str(), pt, rhs, detail::default_tol(source));
}

// ---------------------------------------------------------------------------
// a = 1 dispersion relation

/// Bloch data at energy E for [V^PT]_- = -2m sn^2(ix+beta) + 1 + m.
/// alpha1 solves E = m sn^2(alpha1); k is reduced to (-pi/L, pi/L] with
/// L = 2K'(m), and `branch` (+1/-1) records which of the two Bloch solutions
/// H(u +- alpha1) exp(-+ u Z(alpha1)) / Theta(u) carries it.
struct DispersionPoint {
  double energy = 0.0;
  cplx alpha1;
  cplx k;
  int branch = 1;
};

/// Bloch phase of the (+) solution over one period, k L = -pi alpha1/K - 2K' Z(alpha1)
/// (unreduced).  Follows from the quasi-periodicity
/// H(u + 2iK') = -q^{-1} e^{-i pi u/K} H(u) and the same law for Theta.
inline cplx bloch_phase_a1(const ThetaBundle& tb, cplx alpha1) {
  const Modulus& mod = tb.modulus();
  return -kPi * alpha1 / mod.K() - 2.0 * mod.Kprime() * zeta_Z(tb, alpha1);
}

inline cplx reduce_to_zone(cplx k, double L) {
  const double period = 2.0 * kPi / L;
  double re = std::remainder(k.real(), period);  // in [-pi/L, pi/L]
  if (re <= -kPi / L + 1e-14 * period) re += period;
  return {re, k.imag()};
}

inline DispersionPoint dispersion_analytic(double m, double beta, double E,
                                           double imag_tol = 1e-6) {
  (void)beta;  // the Bloch phase is translation invariant
  const Modulus mod(m);
  const ThetaBundle tb(mod);
  const double L = 2.0 * mod.Kprime();
  DispersionPoint p;
  p.energy = E;
  p.alpha1 = inverse_sn(std::sqrt(cplx(E / m)), mod);
  const cplx theta = bloch_phase_a1(tb, p.alpha1);
  bool found = false;
  for (int s : {1, -1}) {
    const cplx k = reduce_to_zone(double(s) * theta / L, L);
    if (std::abs(k.imag()) > imag_tol) continue;
    if (!found || (k.real() >= 0.0 && p.k.real() < 0.0)) {
      p.k = k;
      p.branch = s;
      found = true;
    }
  }
  if (!found) {
    std::ostringstream os;
    os << "dispersion_analytic: no branch gives real k at E = " << E << " (k L = " << theta
       << ")";
    throw BranchError(os.str());
  }
  return p;
}

/// Closed-form Bloch solution H(u + s alpha1) exp(-s u Z(alpha1)) / Theta(u),
/// u = ix + beta, of -psi'' + [1 + m - 2m sn^2(ix+beta)] psi = E psi.
class BlochSolution {
 public:
  BlochSolution(double m, double beta, double E, int sign)
      : tb_(Modulus(m)), beta_(beta), sign_(sign >= 0 ? 1 : -1) {
    alpha_ = inverse_sn(std::sqrt(cplx(E / m)), tb_.modulus());
    zeta_ = zeta_Z(tb_, alpha_);
  }

  Jet operator()(const Jet& x) const {
    const Jet u = x * kI + beta_;
    const double s = sign_;
    const auto shifted_eta = theta_functions(tb_, u + s * alpha_).first;
    const auto theta = theta_functions(tb_, u).second;
    if (std::abs(theta.value()) < 1e-12)
      throw PoleError("bloch solution: theta vanishes at the evaluation point", u.value());
    return shifted_eta * exp(-s * zeta_ * u) / theta;
  }

  cplx operator()(double x) const { return (*this)(Jet::variable(x, 0)).value(); }

  /// exp(i k L) for this solution.
  cplx bloch_factor() const {
    return std::exp(kI * double(sign_) * bloch_phase_a1(tb_, alpha_));
  }

  cplx alpha1() const noexcept { return alpha_; }
  int sign() const noexcept { return sign_; }
  double period() const noexcept { return 2.0 * tb_.modulus().Kprime(); }

 private:
  ThetaBundle tb_;
  double beta_;
  int sign_;
  cplx alpha_;
  cplx zeta_;
};

inline cplx bloch_solution_eval(double m, double beta, double E, int sign, double x) {
  return BlochSolution(m, beta, E, sign)(x);
}

}  // namespace ptlame

#endif  // PTLAME_SPECTRA_HPP
