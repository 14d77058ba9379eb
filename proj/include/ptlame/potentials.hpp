#ifndef PTLAME_POTENTIALS_HPP
#define PTLAME_POTENTIALS_HPP

// Composable descriptions of Lame-family potentials and their evaluation as
// analytic functions.  A PotentialSpec is an immutable expression tree:
//
//   Lame(a)                    a(a+1) m sn^2(z)
//   AssociatedLame(a, b)       a(a+1) m sn^2(z) + b(b+1) m cn^2(z)/dn^2(z)
//   PTTransform(V, beta)       -V(i z + beta)
//   Shifted(V, c)              V(z) - c
//   SusyPartner(V)             W^2 + W',  W = -psi_g'/psi_g
//
// Every node knows its closed-form band edges when they can be derived from
// the tabulated real forms; SusyPartner requires a zero-energy ground state.

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ptlame/closed_forms.hpp"
#include "ptlame/elliptic.hpp"
#include "ptlame/errors.hpp"
#include "ptlame/jet.hpp"

namespace ptlame {

enum class PotentialKind { Lame, AssociatedLame, PTTransform, Shifted, SusyPartner };

/// Tolerance on the ground energy of a SusyPartner source.
inline constexpr double kGroundEnergyTol = 1e-9;
/// Minimum distance of beta from a value that puts a pole on the line.
inline constexpr double kBetaPoleTol = 1e-4;

class PotentialSpec;
PotentialSpec pt_transform(const PotentialSpec& spec, double beta);
PotentialSpec shifted(const PotentialSpec& spec, double c);
PotentialSpec susy_partner(const PotentialSpec& spec);
Jet eval_jet(const PotentialSpec& spec, const Jet& z);

class PotentialSpec {
 public:
  static PotentialSpec lame(int a, double m) {
    if (a < 1) throw SpecError("Lame potential requires a >= 1");
    return PotentialSpec(std::make_shared<const Node>(
        Node{PotentialKind::Lame, a, 0, Modulus(m), {}, 0.0, 0.0, {}, base_edges(a, 0, m)}));
  }

  /// b == 0 yields the plain Lame node.
  static PotentialSpec associated_lame(int a, int b, double m) {
    if (b == 0) return lame(a, m);
    if (b < 0 || a < b) throw SpecError("associated Lame potential requires a >= b >= 1");
    return PotentialSpec(std::make_shared<const Node>(Node{PotentialKind::AssociatedLame, a, b,
                                                           Modulus(m), {}, 0.0, 0.0, {},
                                                           base_edges(a, b, m)}));
  }

  PotentialKind kind() const noexcept { return node_->kind; }
  int a() const noexcept { return node_->a; }
  int b() const noexcept { return node_->b; }
  const Modulus& modulus() const noexcept { return node_->mod; }
  double m() const noexcept { return node_->mod.m(); }
  double beta() const noexcept { return node_->beta; }
  double shift() const noexcept { return node_->shift; }
  const PotentialSpec& inner() const {
    if (node_->inner.empty()) throw SpecError("base potential has no inner spec");
    return node_->inner.front();
  }

  bool is_base() const noexcept {
    return kind() == PotentialKind::Lame || kind() == PotentialKind::AssociatedLame;
  }

  bool contains_pt() const {
    if (kind() == PotentialKind::PTTransform) return true;
    return !is_base() && inner().contains_pt();
  }

  /// Real period: 2K(m) for the real potentials, 2K'(m) once PT-transformed.
  double period() const {
    return contains_pt() ? 2.0 * modulus().Kprime() : 2.0 * modulus().K();
  }

  /// Number of band gaps of the underlying (a, b) family: a.
  int gap_count() const noexcept { return a(); }

  /// Closed-form band edges (ascending energy), if derivable.
  const std::optional<EdgeList>& closed_form_edges() const noexcept { return node_->edges; }

  std::string describe() const {
    std::ostringstream os;
    switch (kind()) {
      case PotentialKind::Lame:
        os << "Lame(a=" << a() << ")";
        break;
      case PotentialKind::AssociatedLame:
        os << "AssociatedLame(a=" << a() << ",b=" << b() << ")";
        break;
      case PotentialKind::PTTransform:
        os << "PT(" << inner().describe() << ",beta=" << beta() << ")";
        break;
      case PotentialKind::Shifted:
        os << "Shifted(" << inner().describe() << ",c=" << shift() << ")";
        break;
      case PotentialKind::SusyPartner:
        os << "Partner(" << inner().describe() << ")";
        break;
    }
    return os.str();
  }

 private:
  struct Node {
    PotentialKind kind;
    int a;
    int b;
    Modulus mod;
    std::vector<PotentialSpec> inner;  // empty or one element
    double beta;
    double shift;
    std::optional<EdgeForm> ground;  // SusyPartner only: psi_g of the source
    std::optional<EdgeList> edges;
  };

  explicit PotentialSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::optional<EdgeList> base_edges(int a, int b, double m) {
    return real_closed_form_edges(a, b, Modulus(m));
  }

  const Node& node() const { return *node_; }

  friend PotentialSpec pt_transform(const PotentialSpec&, double);
  friend PotentialSpec shifted(const PotentialSpec&, double);
  friend PotentialSpec susy_partner(const PotentialSpec&);
  friend Jet eval_jet(const PotentialSpec&, const Jet&);

  std::shared_ptr<const Node> node_;
};

namespace detail {

// Distance (in argument units) from a jet's root, estimated as |g| / |g'|.
inline void guard_zero(const Jet& g, const char* who) {
  const double dist = g.order() >= 1 && std::abs(g[1]) > 0.0
                          ? std::abs(g.value()) / std::abs(g[1])
                          : std::abs(g.value());
  if (!(dist >= kPoleTol) || !std::isfinite(std::abs(g.value()))) {
    std::ostringstream os;
    os << who << ": ground-state eigenfunction vanishes near the evaluation point";
    throw PoleError(os.str(), g.value());
  }
}

// W = -psi_g'/psi_g in the local variable; returns the jet of order n + 1
// for an input of order n + 2.
inline Jet log_derivative_superpotential(const EdgeForm& ground, const Jet& t) {
  const Jet g = ground.psi(t);
  guard_zero(g, "superpotential");
  return -(g.differentiated() / g.truncated(g.order() - 1));
}

}  // namespace detail

inline PotentialSpec pt_transform(const PotentialSpec& spec, double beta) {
  if (spec.contains_pt()) throw SpecError("pt_transform: spec is already PT-transformed");
  const Modulus& mod = spec.modulus();
  const double K = mod.K();
  if (!(beta > 0.0 && beta < 2.0 * K)) {
    std::ostringstream os;
    os << "pt_transform: beta = " << beta << " must lie in (0, 2K(m)) = (0, " << 2.0 * K
       << ")";
    throw SpecError(os.str());
  }
  // sn poles sit on Re z = 0 mod 2K; dn zeros (cn^2/dn^2 poles) on Re z = K mod 2K
  if (beta < kBetaPoleTol || 2.0 * K - beta < kBetaPoleTol)
    throw SpecError("pt_transform: beta too close to a pole line of sn");
  if (spec.b() > 0 && std::abs(beta - K) < kBetaPoleTol)
    throw SpecError("pt_transform: beta too close to a zero line of dn");

  std::optional<EdgeList> edges;
  if (const auto& inner_edges = spec.closed_form_edges()) {
    EdgeList out;
    out.reserve(inner_edges->size());
    for (auto it = inner_edges->rbegin(); it != inner_edges->rend(); ++it) {
      auto psi = it->psi;
      out.push_back({-it->energy,
                     [psi, beta](const Jet& z) { return psi(z * kI + beta); }});
    }
    edges = std::move(out);
  }
  PotentialSpec result(std::make_shared<const PotentialSpec::Node>(PotentialSpec::Node{
      PotentialKind::PTTransform, spec.a(), spec.b(), mod, {spec}, beta, 0.0, {},
      std::move(edges)}));

  // the line i x + beta must stay clear of every singularity over a period
  const double L = result.period();
  constexpr int kProbe = 512;
  for (int k = 0; k < kProbe; ++k) {
    const double x = L * k / kProbe;
    try {
      const cplx v = eval_jet(result, Jet(x).truncated(0)).value();
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw SpecError("pt_transform: non-finite potential on the line");
    } catch (const PoleError& e) {
      std::ostringstream os;
      os << "pt_transform: beta = " << beta << " puts a singularity on the line (" << e.what()
         << ")";
      throw SpecError(os.str());
    }
  }
  return result;
}

inline PotentialSpec shifted(const PotentialSpec& spec, double c) {
  std::optional<EdgeList> edges;
  if (const auto& inner_edges = spec.closed_form_edges()) {
    EdgeList out = *inner_edges;
    for (auto& e : out) e.energy -= c;
    edges = std::move(out);
  }
  return PotentialSpec(std::make_shared<const PotentialSpec::Node>(PotentialSpec::Node{
      PotentialKind::Shifted, spec.a(), spec.b(), spec.modulus(), {spec}, spec.node().beta, c,
      {}, std::move(edges)}));
}

/// The spec shifted so that its lowest closed-form band edge sits at zero.
inline PotentialSpec shifted_to_zero(const PotentialSpec& spec) {
  const auto& edges = spec.closed_form_edges();
  if (!edges || edges->empty())
    throw SpecError("shifted_to_zero: no closed-form ground state for " + spec.describe());
  return shifted(spec, edges->front().energy);
}

/// SUSY partner W^2 + W' of a spec whose closed-form ground state has zero
/// energy.  Band edges carry over: psi_0 -> 1/psi_0, psi_n -> (d/dx + W) psi_n.
inline PotentialSpec susy_partner(const PotentialSpec& spec) {
  const auto& edges = spec.closed_form_edges();
  if (!edges || edges->empty())
    throw SpecError("susy_partner: no closed-form ground state for " + spec.describe());
  const EdgeForm ground = edges->front();
  if (std::abs(ground.energy) > kGroundEnergyTol) {
    std::ostringstream os;
    os << "susy_partner: ground energy " << ground.energy
       << " is not zero; shift the spec first";
    throw SpecError(os.str());
  }
  EdgeList out;
  out.reserve(edges->size());
  out.push_back({0.0, [ground](const Jet& z) {
                   const Jet g = ground.psi(z);
                   return Jet(1.0) / g;
                 }});
  for (std::size_t n = 1; n < edges->size(); ++n) {
    const EdgeForm e = (*edges)[n];
    out.push_back({e.energy, [ground, e](const Jet& z) {
                     return in_local_variable(z, 1, [&](const Jet& t) {
                       const Jet W = detail::log_derivative_superpotential(ground, t);
                       const Jet p = e.psi(t);
                       return p.differentiated() + W * p;
                     });
                   }});
  }
  return PotentialSpec(std::make_shared<const PotentialSpec::Node>(PotentialSpec::Node{
      PotentialKind::SusyPartner, spec.a(), spec.b(), spec.modulus(), {spec},
      spec.node().beta, 0.0, ground, std::move(out)}));
}

/// V as an analytic function of its own variable, evaluated on a jet.
inline Jet eval_jet(const PotentialSpec& spec, const Jet& z) {
  const auto& n = spec.node();
  switch (n.kind) {
    case PotentialKind::Lame: {
      const auto j = jacobi(z, n.mod);
      return double(n.a * (n.a + 1)) * n.mod.m() * sqr(j.sn);
    }
    case PotentialKind::AssociatedLame: {
      const auto j = jacobi(z, n.mod);
      if (std::abs(j.dn.value()) < kPoleTol)
        throw PoleError("associated Lame: dn vanishes at the evaluation point", z.value());
      const double m = n.mod.m();
      return double(n.a * (n.a + 1)) * m * sqr(j.sn) +
             double(n.b * (n.b + 1)) * m * sqr(j.cn / j.dn);
    }
    case PotentialKind::PTTransform:
      return -eval_jet(n.inner.front(), z * kI + n.beta);
    case PotentialKind::Shifted:
      return eval_jet(n.inner.front(), z) - n.shift;
    case PotentialKind::SusyPartner:
      return in_local_variable(z, 2, [&](const Jet& t) {
        const Jet W = detail::log_derivative_superpotential(*n.ground, t);
        return W * W + W.differentiated();
      });
  }
  return Jet(0.0);
}

/// V(z) at a single complex point of the spec's own variable.  Plain
/// complex arithmetic except under a SusyPartner, which needs jets.
inline cplx eval_value(const PotentialSpec& spec, cplx z) {
  switch (spec.kind()) {
    case PotentialKind::Lame: {
      const auto j = jacobi_complex(z, spec.modulus());
      return double(spec.a() * (spec.a() + 1)) * spec.m() * j.sn * j.sn;
    }
    case PotentialKind::AssociatedLame: {
      const auto j = jacobi_complex(z, spec.modulus());
      if (std::abs(j.dn) < kPoleTol)
        throw PoleError("associated Lame: dn vanishes at the evaluation point", z);
      const double m = spec.m();
      const cplx cd = j.cn / j.dn;
      return double(spec.a() * (spec.a() + 1)) * m * j.sn * j.sn +
             double(spec.b() * (spec.b() + 1)) * m * cd * cd;
    }
    case PotentialKind::PTTransform:
      return -eval_value(spec.inner(), kI * z + spec.beta());
    case PotentialKind::Shifted:
      return eval_value(spec.inner(), z) - spec.shift();
    case PotentialKind::SusyPartner:
      return eval_jet(spec, Jet::variable(z, 0)).value();
  }
  return {};
}

/// V(x) at a real point.
inline cplx eval(const PotentialSpec& spec, double x) { return eval_value(spec, x); }

/// Convenience constructors for the potentials studied here, with their
/// lowest edge at zero: [V^PT]_- for Lame a and associated Lame (a, b).
inline PotentialSpec pt_ground_zeroed(int a, int b, double m, double beta) {
  return shifted_to_zero(pt_transform(PotentialSpec::associated_lame(a, b, m), beta));
}

// ---------------------------------------------------------------------------
// Superpotentials

enum class SuperpotentialForm { ClosedForm, NumericLogDerivative };

/// W(x) = -psi_g'(x)/psi_g(x) for a zero-ground-energy source spec.  The
/// closed forms exist for the ground-zeroed PT Lame a = 1, a = 3 and PT
/// associated Lame (2,1) potentials; the numeric form works for any spec
/// with a closed-form ground state and differentiates it analytically.
class Superpotential {
 public:
  static Superpotential closed_form(const PotentialSpec& source) {
    if (!(source.kind() == PotentialKind::Shifted &&
          source.inner().kind() == PotentialKind::PTTransform &&
          source.inner().inner().is_base()))
      throw SpecError("closed-form superpotential needs Shifted(PT(base)): got " +
                      source.describe());
    const PotentialSpec& base = source.inner().inner();
    const bool known = (base.b() == 0 && (base.a() == 1 || base.a() == 3)) ||
                       (base.a() == 2 && base.b() == 1);
    if (!known)
      throw SpecError("no closed-form superpotential for " + base.describe());
    check_zero_ground(source);
    return Superpotential(source, SuperpotentialForm::ClosedForm);
  }

  static Superpotential numeric(const PotentialSpec& source) {
    check_zero_ground(source);
    return Superpotential(source, SuperpotentialForm::NumericLogDerivative);
  }

  const PotentialSpec& source() const noexcept { return source_; }
  SuperpotentialForm form() const noexcept { return form_; }

  /// W on a jet in the source's variable.
  Jet operator()(const Jet& x) const {
    if (form_ == SuperpotentialForm::NumericLogDerivative) {
      const EdgeForm& ground = source_.closed_form_edges()->front();
      return in_local_variable(x, 1, [&](const Jet& t) {
        return detail::log_derivative_superpotential(ground, t);
      });
    }
    const PotentialSpec& pt = source_.inner();
    const PotentialSpec& base = pt.inner();
    const double m = base.m();
    const Jet z = x * kI + pt.beta();
    const auto j = jacobi(z, base.modulus());
    if (base.b() == 0 && base.a() == 1) {
      detail::guard_zero(j.sn, "superpotential");
      return -kI * j.cn * j.dn / j.sn;
    }
    const EdgeConstants d(m);
    if (base.b() == 0) {  // a = 3
      const Jet den = 2.0 + 2.0 * m - d.delta3 - 5.0 * m * sqr(j.sn);
      detail::guard_zero(j.sn, "superpotential");
      detail::guard_zero(den, "superpotential");
      return -kI * j.cn * j.dn / j.sn + 10.0 * m * kI * j.cn * j.sn * j.dn / den;
    }
    // (a, b) = (2, 1)
    const Jet den = 3.0 * m * sqr(j.sn) - 2.0 + d.root43;
    detail::guard_zero(j.cn, "superpotential");
    detail::guard_zero(den, "superpotential");
    return kI * j.sn * j.dn / j.cn - m * kI * j.cn * j.sn / j.dn -
           6.0 * m * kI * j.sn * j.dn * j.cn / den;
  }

 private:
  Superpotential(PotentialSpec source, SuperpotentialForm form)
      : source_(std::move(source)), form_(form) {}

  static void check_zero_ground(const PotentialSpec& source) {
    const auto& edges = source.closed_form_edges();
    if (!edges || edges->empty())
      throw SpecError("superpotential: no closed-form ground state for " + source.describe());
    if (std::abs(edges->front().energy) > kGroundEnergyTol)
      throw SpecError("superpotential: source ground energy is not zero");
  }

  PotentialSpec source_;
  SuperpotentialForm form_;
};

inline cplx superpotential_eval(const Superpotential& w, double x) {
  return w(Jet::variable(x, 0)).value();
}

/// W(x) and W'(x) together.
inline std::pair<cplx, cplx> superpotential_with_derivative(const Superpotential& w, double x) {
  const Jet j = w(Jet::variable(x, 1));
  return {j.value(), j[1]};
}

/// [V]_+ at x for a SusyPartner spec.
inline cplx partner_eval(const PotentialSpec& spec, double x) {
  if (spec.kind() != PotentialKind::SusyPartner)
    throw SpecError("partner_eval: spec is not a SUSY partner");
  return eval(spec, x);
}

// ---------------------------------------------------------------------------
// a = b associated Lame as a rescaled Lame potential

/// V_assoc(x) = constant + scale * V_lame(x / alpha) with the Lame potential
/// at the descended parameter m~ and scale = 1/alpha^2.
struct LandenReduction {
  PotentialSpec lame;
  double alpha;
  double scale;
  double constant;
  double max_residual;

  cplx eval(double x) const {
    return constant + scale * ptlame::eval(lame, x / alpha);
  }
};

inline LandenReduction landen_reduce_equal_ab(const PotentialSpec& spec,
                                              double residual_tol = 1e-9) {
  if (spec.kind() != PotentialKind::AssociatedLame || spec.a() != spec.b())
    throw SpecError("landen_reduce_equal_ab: needs an associated Lame spec with a == b");
  const auto ld = landen_descend(spec.m());
  LandenReduction r{PotentialSpec::lame(spec.a(), ld.m_tilde), ld.alpha,
                    1.0 / (ld.alpha * ld.alpha), 0.0, 0.0};
  // fit the constant at one point, then demand it works everywhere
  const double x_fit = 0.1;
  r.constant = (ptlame::eval(spec, x_fit) - r.scale * ptlame::eval(r.lame, x_fit / r.alpha)).real();
  const double L = spec.period();
  constexpr int kGrid = 100;
  for (int k = 0; k < kGrid; ++k) {
    const double x = L * (k + 0.5) / kGrid;
    r.max_residual = std::max(r.max_residual, std::abs(ptlame::eval(spec, x) - r.eval(x)));
  }
  if (!(r.max_residual < residual_tol)) {
    std::ostringstream os;
    os << "landen_reduce_equal_ab: residual " << r.max_residual << " is not constant";
    throw ConvergenceError(os.str());
  }
  return r;
}

}  // namespace ptlame

#endif  // PTLAME_POTENTIALS_HPP
