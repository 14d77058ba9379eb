#ifndef PTLAME_CHECKS_HPP
#define PTLAME_CHECKS_HPP

// Invariant checks shared by the selfcheck command and the acceptance suite.
// Each check reports the worst observed violation against its tolerance.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ptlame/spectra.hpp"

namespace ptlame::checks {

struct CheckResult {
  std::string name;
  double value = 0.0;      // worst violation (or the measured quantity)
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
  bool lower_bound = false;  // value must exceed tolerance rather than stay below it
};

struct CheckOptions {
  double m = 0.75;
  double beta = 0.5;
  double floquet_tol = 1e-6;  // tolerance for anything compared against Floquet edges
  double density = 200.0;     // coarse samples per unit energy for edge searches
  unsigned workers = 1;
};

inline CheckResult below(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, value < tol, std::move(detail)};
}

inline CheckResult above(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), value, bound, value > bound, std::move(detail), true};
}

inline constexpr double kModuli[] = {0.1, 0.25, 0.5, 0.75, 0.9};

/// 50 deterministic points of the rectangle [-2.5, 2.5] x [-1.8, 1.8],
/// skipping anything within 0.05 of a pole of sn.
inline std::vector<cplx> complex_grid(const Modulus& mod, int count = 50) {
  std::vector<cplx> pts;
  // additive recurrence with the plastic-number increments
  const double g = 1.32471795724474602596;
  const double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  for (int n = 1; static_cast<int>(pts.size()) < count; ++n) {
    const double u = std::fmod(0.5 + a1 * n, 1.0), v = std::fmod(0.5 + a2 * n, 1.0);
    const cplx z(-2.5 + 5.0 * u, -1.8 + 3.6 * v);
    if (std::abs(z - nearest_pole(z, mod)) < 0.05) continue;
    pts.push_back(z);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// elliptic

inline CheckResult elliptic_identities() {
  double worst = 0.0;
  for (double m : kModuli) {
    const Modulus mod(m);
    for (cplx z : complex_grid(mod)) {
      const auto j = jacobi_complex(z, mod);
      worst = std::max(worst, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0));
      worst = std::max(worst, std::abs(j.dn * j.dn + m * j.sn * j.sn - 1.0));
    }
  }
  return below("sn^2+cn^2=1 and dn^2+m sn^2=1 on a 50x5 complex grid", worst, 1e-11);
}

/// sqrt(m) sn(x, m) + dn(ix + K'(m) + iK(m), 1 - m) = 0.
inline CheckResult complementary_dn_identity() {
  double worst = 0.0;
  for (double m : {0.5, 0.25, 0.75}) {
    const Modulus mod(m), dual(1.0 - m);
    for (int k = 0; k < 50; ++k) {
      const double x = -3.0 + 6.0 * (k + 0.5) / 50.0;
      const cplx lhs = std::sqrt(m) * jacobi_real(x, mod).sn;
      const cplx z = kI * x + mod.Kprime() + kI * mod.K();
      worst = std::max(worst, std::abs(lhs + jacobi_complex(z, dual).dn));
    }
  }
  return below("sqrt(m) sn(x,m) = -dn(ix+K'+iK, 1-m) on 50 points", worst, 1e-10);
}

/// H(u + 2iK') = -q^{-1} exp(-i pi u / K) H(u) for u = ix + beta, and the
/// same factor for Theta.  Relative error.
inline CheckResult eta_quasi_periodicity(double m = 0.75, double beta = 0.5) {
  const Modulus mod(m);
  const ThetaBundle tb(mod);
  const double K = mod.K(), Kp = mod.Kprime();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x = -Kp + 2.0 * Kp * (k + 0.5) / 50.0;
    const cplx u = kI * x + beta;
    const cplx factor = -std::exp(-kI * kPi * u / K) / mod.q();
    const auto a = theta_functions(tb, u);
    const auto b = theta_functions(tb, u + 2.0 * kI * Kp);
    worst = std::max(worst, std::abs(b.H - factor * a.H) / std::abs(factor * a.H));
    worst = std::max(worst, std::abs(b.Theta - factor * a.Theta) / std::abs(factor * a.Theta));
  }
  return below("H, Theta(u+2iK') = -exp(-i pi u/K)/q * H, Theta(u), u = ix+beta", worst, 1e-10);
}

inline std::vector<CheckResult> period_reproduction() {
  const Modulus mod(0.75);
  const double L = 2.0 * mod.Kprime();
  return {below("2K'(0.75) vs reference value 3.3715", std::abs(L - 3.3715), 5e-5),
          below("K'(0.75) vs K(0.25) (relative)",
                std::abs(mod.Kprime() - complete_K(0.25)) / complete_K(0.25), 1e-13)};
}

// ---------------------------------------------------------------------------
// closed forms against Floquet

inline EdgeSearchOptions search_options(const CheckOptions& opt) {
  EdgeSearchOptions s;
  s.density = opt.density;
  s.workers = opt.workers;
  return s;
}

/// Floquet edges of a ground-zeroed spec, searched over [-1, top + 2].
inline EdgeSearchResult floquet_edges(const PotentialSpec& spec, double top,
                                      const CheckOptions& opt) {
  return find_band_edges(spec, -1.0, top + 2.0, search_options(opt));
}

inline std::string classes_string(const std::vector<PeriodClass>& c) {
  std::string s;
  for (auto p : c) s += to_char(p);
  return s;
}

/// Closed-form edges (energies and classes) against the Floquet edge finder.
inline CheckResult table_vs_floquet(const std::string& name, const std::vector<BandEdge>& table,
                                    const PotentialSpec& spec, const CheckOptions& opt) {
  const auto numeric = floquet_edges(spec, table.back().energy, opt).simple_edges();
  std::vector<PeriodClass> want, got;
  for (const auto& e : table) want.push_back(e.period_class);
  for (const auto& e : numeric) got.push_back(e.period_class);
  double worst = 0.0;
  if (numeric.size() != table.size()) {
    worst = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t j = 0; j < table.size(); ++j)
      worst = std::max(worst, std::abs(table[j].energy - numeric[j].energy));
  }
  std::ostringstream os;
  os << "classes table " << classes_string(want) << " floquet " << classes_string(got);
  auto r = below(name, worst, opt.floquet_tol, os.str());
  r.pass = r.pass && want == got;
  return r;
}

inline CheckResult a3_pt_edges(const CheckOptions& opt) {
  return table_vs_floquet("a=3 PT closed-form edges vs Floquet",
                          lame_pt_edges_a3(opt.m, opt.beta),
                          pt_ground_zeroed(3, 0, opt.m, opt.beta), opt);
}

inline CheckResult assoc21_pt_edges(const CheckOptions& opt) {
  return table_vs_floquet("(2,1) PT closed-form edges vs Floquet",
                          assoc_pt_edges_21(opt.m, opt.beta),
                          pt_ground_zeroed(2, 1, opt.m, opt.beta), opt);
}

inline CheckResult a1_edges(const CheckOptions& opt) {
  return table_vs_floquet("a=1 PT edges {0, m, 1} vs Floquet", lame_pt_edges_a1(opt.m, opt.beta),
                          pt_ground_zeroed(1, 0, opt.m, opt.beta), opt);
}

inline CheckResult eigenfunction_residuals(const CheckOptions& opt) {
  double worst = 0.0, periodic = 0.0;
  auto run = [&](const std::vector<BandEdge>& edges, const PotentialSpec& spec) {
    for (const auto& e : edges) {
      worst = std::max(worst, eigen_residual(e, spec, 40));
      periodic = std::max(periodic, periodicity_defect(e, spec.period()));
    }
  };
  run(lame_pt_edges_a1(opt.m, opt.beta), pt_ground_zeroed(1, 0, opt.m, opt.beta));
  run(lame_pt_edges_a3(opt.m, opt.beta), pt_ground_zeroed(3, 0, opt.m, opt.beta));
  run(assoc_pt_edges_21(opt.m, opt.beta), pt_ground_zeroed(2, 1, opt.m, opt.beta));
  std::ostringstream os;
  os << "max periodicity defect " << periodic;
  auto r = below("tabulated eigenfunction ODE residuals (40-point grid)", worst, 1e-8, os.str());
  r.pass = r.pass && periodic < 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// dualities and the discriminant relation

inline CheckResult from_report(const DualityReport& d) {
  return {d.relation, d.max_violation, d.tolerance, d.pass, {}};
}

inline std::vector<CheckResult> dualities(const CheckOptions& opt) {
  std::vector<CheckResult> out;
  const auto sopt = search_options(opt);
  for (int a : {1, 3})
    for (double m : {0.3, 0.5, 0.75})
      out.push_back(from_report(modulus_duality_check(a, m, EdgeSource::ClosedForm)));
  // Floquet on both sides where the closed forms would make it an identity
  {
    auto r = modulus_duality_check(3, 0.3, EdgeSource::Floquet, sopt);
    r.relation += " (Floquet)";
    r.tolerance = opt.floquet_tol;
    r.pass = r.max_violation < r.tolerance;
    out.push_back(from_report(r));
  }
  for (int a : {1, 3}) out.push_back(from_report(half_modulus_sum_rule(a, EdgeSource::ClosedForm)));
  {
    auto r = half_modulus_sum_rule(2, EdgeSource::Floquet, sopt);
    r.tolerance = opt.floquet_tol;
    r.pass = r.max_violation < r.tolerance;
    out.push_back(from_report(r));
  }
  out.push_back(from_report(pt_duality_check(1, opt.m, opt.beta, EdgeSource::ClosedForm)));
  out.push_back(from_report(pt_duality_check(3, opt.m, opt.beta, EdgeSource::ClosedForm)));
  {
    // tabulated PT energies (plus E_g) against Floquet edges of the real
    // Lame potential at 1 - m
    std::vector<double> lhs;
    const double eg = pt_ground_energy(3, 0, opt.m);
    for (const auto& e : lame_pt_edges_a3(opt.m, opt.beta)) lhs.push_back(e.energy + eg);
    auto rhs = lame_edge_energies(3, 1.0 - opt.m, EdgeSource::Floquet, sopt);
    for (double& e : rhs) e -= 12.0;
    std::ostringstream os;
    os << "E^PT_j(m) = E_j(1-m) - a(a+1), a=3, closed form at m=" << opt.m << " vs Floquet at 1-m";
    double worst = lhs.size() == rhs.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < std::min(lhs.size(), rhs.size()); ++j)
      worst = std::max(worst, std::abs(lhs[j] - rhs[j]));
    out.push_back(below(os.str(), worst, opt.floquet_tol));
  }
  return out;
}

/// max over 20 energies |Delta^PT(E, m) - Delta(E + a(a+1), 1 - m)|.
inline CheckResult discriminant_relation(int a, const CheckOptions& opt) {
  const auto pt = pt_transform(PotentialSpec::lame(a, opt.m), opt.beta);
  const auto dual = PotentialSpec::lame(a, 1.0 - opt.m);
  const double n = a * (a + 1);
  double worst = 0.0, imag = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double E = -n - 1.0 + (n + 2.0) * (k + 0.5) / 20.0;
    const cplx d1 = monodromy(pt, E).discriminant;
    const cplx d2 = monodromy(dual, E + n).discriminant;
    worst = std::max(worst, std::abs(d1 - d2));
    imag = std::max(imag, std::abs(d1.imag()));
  }
  std::ostringstream name, detail;
  name << "Delta^PT(E,m) = Delta(E+a(a+1),1-m), a=" << a << ", 20 energies";
  detail << "max |Im Delta^PT| " << imag;
  return below(name.str(), worst, opt.floquet_tol, detail.str());
}

// ---------------------------------------------------------------------------
// dispersion

/// 15 energies strictly inside the a = 1 bands [0, m] and [1, inf).
inline std::vector<double> in_band_energies(double m) {
  std::vector<double> e;
  for (int k = 1; k <= 8; ++k) e.push_back(m * k / 9.0);
  for (int k = 1; k <= 7; ++k) e.push_back(1.0 + 0.6 * k);
  return e;
}

inline std::vector<CheckResult> dispersion(const CheckOptions& opt) {
  const double m = opt.m, beta = opt.beta;
  const auto spec = pt_ground_zeroed(1, 0, m, beta);
  double worst = 0.0;
  for (double E : in_band_energies(m)) {
    const auto p = dispersion_analytic(m, beta, E);
    worst = std::max(worst, std::abs(p.k - dispersion_numeric(spec, E)));
  }
  std::vector<CheckResult> out{
      below("a=1 analytic k vs Floquet arccos(Delta/2)/L at 15 in-band energies", worst,
            opt.floquet_tol)};

  const double E = 0.5 * m;
  const auto p = dispersion_analytic(m, beta, E);
  const double L = 2.0 * Modulus(m).Kprime();
  double residual = 0.0, factor = 0.0;
  for (int s : {1, -1}) {
    const BlochSolution psi(m, beta, E, s);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double x = L * (k + 0.5) / 20.0;
      const Jet j = psi(Jet::variable(x, 2));
      const cplx vpsi = eval(spec, x) * j.value();
      num = std::max(num, std::abs(-j.derivative(2) + vpsi - E * j.value()));
      den = std::max(den, std::abs(vpsi));
      // the solution carrying the selected branch has factor e^{ikL}
      const cplx expected = std::exp(kI * double(s * p.branch) * p.k * L);
      factor = std::max(factor, std::abs(psi(x + L) - expected * psi(x)) / std::abs(psi(x)));
    }
    residual = std::max(residual, num / den);
  }
  out.push_back(below("Bloch closed form ODE residual, E=m/2, both signs", residual, 1e-7));
  out.push_back(below("Bloch factor psi(x+L) = exp(+-ikL) psi(x)", factor, 1e-7));
  return out;
}

// ---------------------------------------------------------------------------
// supersymmetry

/// max over the grid |W^2 - W' - V_-| for the three closed-form superpotentials.
inline CheckResult susy_factorization(const CheckOptions& opt) {
  double worst = 0.0;
  for (auto [a, b] : {std::pair{1, 0}, std::pair{3, 0}, std::pair{2, 1}}) {
    const auto src = pt_ground_zeroed(a, b, opt.m, opt.beta);
    const auto w = Superpotential::closed_form(src);
    const double L = src.period();
    for (int k = 0; k < 50; ++k) {
      const double x = L * (k + 0.5) / 50.0;
      const auto [W, dW] = superpotential_with_derivative(w, x);
      worst = std::max(worst, std::abs(W * W - dW - eval(src, x)));
    }
  }
  return below("W^2 - W' reconstructs [V^PT]_- for a=1, a=3, (2,1)", worst, 1e-8);
}

inline double max_edge_difference(const EdgeSearchResult& x, const EdgeSearchResult& y) {
  const auto a = x.simple_edges(), b = y.simple_edges();
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    worst = std::max(worst, std::abs(a[j].energy - b[j].energy));
  return worst;
}

inline CheckResult partner_isospectral(const CheckOptions& opt) {
  double worst = 0.0;
  std::ostringstream os;
  for (auto [a, b] : {std::pair{1, 0}, std::pair{3, 0}, std::pair{2, 1}}) {
    const auto minus = pt_ground_zeroed(a, b, opt.m, opt.beta);
    const auto plus = susy_partner(minus);
    const double top = minus.closed_form_edges()->back().energy;
    const double d = max_edge_difference(floquet_edges(minus, top, opt),
                                         floquet_edges(plus, top, opt));
    os << "(" << a << "," << b << "): " << d << " ";
    worst = std::max(worst, d);
  }
  return below("Floquet edges of [V^PT]_+ equal those of [V^PT]_-", worst, opt.floquet_tol,
               os.str());
}

/// [V^PT]_+(x) = -2m sn^2(ix + beta + iK', m) + m + 1 for a = 1.
inline CheckResult a1_self_isospectral(const CheckOptions& opt) {
  const Modulus mod(opt.m);
  const auto plus = susy_partner(pt_ground_zeroed(1, 0, opt.m, opt.beta));
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x = plus.period() * (k + 0.5) / 50.0;
    const cplx sn = jacobi_complex(kI * x + opt.beta + kI * mod.Kprime(), mod).sn;
    worst = std::max(worst, std::abs(eval(plus, x) - (-2.0 * opt.m * sn * sn + opt.m + 1.0)));
  }
  return below("a=1 [V^PT]_+ is [V^PT]_- translated by iK'", worst, 1e-9);
}

inline double max_pointwise_difference(const PotentialSpec& p, const PotentialSpec& q,
                                       double shift = 0.0) {
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = p.period() * (k + 0.5) / 100.0;
    worst = std::max(worst, std::abs(eval(p, x) - eval(q, x + shift)));
  }
  return worst;
}

/// [V_-]^PT, [V^PT]_+ and [V_+]^PT (each ground-zeroed) share edges but
/// differ pointwise.
inline std::vector<CheckResult> a3_order_exchange(const CheckOptions& opt) {
  const auto minus = pt_ground_zeroed(3, 0, opt.m, opt.beta);
  const auto pt_then_partner = susy_partner(minus);
  const auto partner_then_pt = shifted_to_zero(
      pt_transform(susy_partner(shifted_to_zero(PotentialSpec::lame(3, opt.m))), opt.beta));
  const double top = minus.closed_form_edges()->back().energy;
  const auto e1 = floquet_edges(pt_then_partner, top, opt);
  const auto e2 = floquet_edges(partner_then_pt, top, opt);
  const auto e0 = floquet_edges(minus, top, opt);
  const double same = std::max(max_edge_difference(e1, e2), max_edge_difference(e0, e2));
  const double distinct = std::min({max_pointwise_difference(pt_then_partner, partner_then_pt),
                                    max_pointwise_difference(minus, partner_then_pt),
                                    max_pointwise_difference(minus, pt_then_partner)});
  return {below("a=3 [V_+]^PT and [V^PT]_+ have identical Floquet edges", same, opt.floquet_tol),
          above("a=3 [V_-]^PT, [V^PT]_+, [V_+]^PT pairwise distinct (min of max |dV|)", distinct,
                1e-3)};
}

/// min over real translations s of max_x |[V^PT]_+(x) - [V^PT]_-(x + s)|.
inline double min_translation_distance(const PotentialSpec& plus, const PotentialSpec& minus) {
  const double L = minus.period();
  auto f = [&](double s) { return max_pointwise_difference(plus, minus, s); };
  constexpr int kShifts = 200;
  double best = f(0.0), s_best = 0.0;
  for (int k = 1; k < kShifts; ++k) {
    const double s = L * k / kShifts;
    if (const double v = f(s); v < best) {
      best = v;
      s_best = s;
    }
  }
  const double h = L / kShifts;
  const auto r = boost::math::tools::brent_find_minima(f, s_best - h, s_best + h, 40);
  return std::min(best, r.second);
}

inline CheckResult assoc21_not_self_isospectral(const CheckOptions& opt) {
  const auto minus = pt_ground_zeroed(2, 1, opt.m, opt.beta);
  const auto plus = susy_partner(minus);
  return above("(2,1) PT partner is not a translate (min over shifts of max |dV|)",
               min_translation_distance(plus, minus), 1e-3);
}

inline CheckResult antiperiodic_edges_exist(const CheckOptions& opt) {
  const auto spec = pt_ground_zeroed(3, 0, opt.m, opt.beta);
  const auto edges = floquet_edges(spec, spec.closed_form_edges()->back().energy, opt);
  int count = 0;
  for (const auto& e : edges.simple_edges())
    if (e.period_class == PeriodClass::A && e.discriminant.real() < 0.0) ++count;
  std::ostringstream os;
  os << count << " edges with Delta = -2";
  return {"a=3 PT edge set contains antiperiodic (Delta=-2) edges", double(count), 0.0,
          count >= 1, os.str(), true};
}

// ---------------------------------------------------------------------------

/// Everything the selfcheck command runs, in order.
inline std::vector<CheckResult> full_suite(const CheckOptions& opt) {
  std::vector<CheckResult> out;
  auto add = [&](CheckResult r) { out.push_back(std::move(r)); };
  auto add_all = [&](std::vector<CheckResult> rs) {
    for (auto& r : rs) out.push_back(std::move(r));
  };
  add(elliptic_identities());
  add(complementary_dn_identity());
  add(eta_quasi_periodicity(opt.m, opt.beta));
  add_all(period_reproduction());
  add(a1_edges(opt));
  add(a3_pt_edges(opt));
  add(assoc21_pt_edges(opt));
  add(eigenfunction_residuals(opt));
  add_all(dualities(opt));
  add(discriminant_relation(1, opt));
  add(discriminant_relation(3, opt));
  add_all(dispersion(opt));
  add(susy_factorization(opt));
  add(partner_isospectral(opt));
  add(a1_self_isospectral(opt));
  add_all(a3_order_exchange(opt));
  add(assoc21_not_self_isospectral(opt));
  add(antiperiodic_edges_exist(opt));
  return out;
}

}  // namespace ptlame::checks

#endif  // PTLAME_CHECKS_HPP
