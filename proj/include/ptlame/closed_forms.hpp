#ifndef PTLAME_CLOSED_FORMS_HPP
#define PTLAME_CLOSED_FORMS_HPP

// Closed-form band edges of the real Lame potentials a(a+1) m sn^2(z) for
// a = 1, 3 and of the associated Lame potential (a, b) = (2, 1), as analytic
// functions of the potential's own variable z.  Energies ascend.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ptlame/elliptic.hpp"

namespace ptlame {

/// The square roots that appear in the a = 3 and (2,1) edge energies.
struct EdgeConstants {
  double delta1;  // sqrt(1 - m + 4m^2)
  double delta2;  // sqrt(4 - m + m^2)
  double delta3;  // sqrt(4 - 7m + 4m^2)
  double delta4;  // sqrt(4 - 5m + m^2)
  double root43;  // sqrt(4 - 3m)

  explicit EdgeConstants(double m)
      : delta1(std::sqrt(1.0 - m + 4.0 * m * m)),
        delta2(std::sqrt(4.0 - m + m * m)),
        delta3(std::sqrt(4.0 - 7.0 * m + 4.0 * m * m)),
        delta4(std::sqrt(4.0 - 5.0 * m + m * m)),
        root43(std::sqrt(4.0 - 3.0 * m)) {}
};

/// A band-edge eigenfunction as an analytic function of the potential's
/// variable (jet in, jet out), with its energy.
struct EdgeForm {
  double energy;
  std::function<Jet(const Jet&)> psi;
};

using EdgeList = std::vector<EdgeForm>;

namespace forms {

inline EdgeList lame_a1(const Modulus& mod) {
  const double m = mod.m();
  return {
      {m, [mod](const Jet& z) { return jacobi(z, mod).dn; }},
      {1.0, [mod](const Jet& z) { return jacobi(z, mod).cn; }},
      {1.0 + m, [mod](const Jet& z) { return jacobi(z, mod).sn; }},
  };
}

inline EdgeList lame_a3(const Modulus& mod) {
  const double m = mod.m();
  const EdgeConstants d(m);
  auto dn_form = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.dn * (c - 5.0 * m * sqr(j.sn));
    };
  };
  auto cn_form = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.cn * (c - 5.0 * m * sqr(j.sn));
    };
  };
  auto sn_form = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.sn * (c - 5.0 * m * sqr(j.sn));
    };
  };
  return {
      {2.0 + 5.0 * m - 2.0 * d.delta1, dn_form(1.0 + 2.0 * m + d.delta1)},
      {5.0 + 2.0 * m - 2.0 * d.delta2, cn_form(2.0 + m + d.delta2)},
      {5.0 + 5.0 * m - 2.0 * d.delta3, sn_form(2.0 + 2.0 * m + d.delta3)},
      {4.0 + 4.0 * m,
       [mod](const Jet& z) {
         const auto j = jacobi(z, mod);
         return j.sn * j.cn * j.dn;
       }},
      {2.0 + 5.0 * m + 2.0 * d.delta1, dn_form(1.0 + 2.0 * m - d.delta1)},
      {5.0 + 2.0 * m + 2.0 * d.delta2, cn_form(2.0 + m - d.delta2)},
      {5.0 + 5.0 * m + 2.0 * d.delta3, sn_form(2.0 + 2.0 * m - d.delta3)},
  };
}

inline EdgeList associated_21(const Modulus& mod) {
  const double m = mod.m();
  const EdgeConstants d(m);
  auto cd_form = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.cn / j.dn * (3.0 * m * sqr(j.sn) + c);
    };
  };
  auto sd_form = [mod, m](double c) {
    return [mod, m, c](const Jet& z) {
      const auto j = jacobi(z, mod);
      return j.sn / j.dn * (3.0 * m * sqr(j.sn) + c);
    };
  };
  return {
      {4.0 * m, [mod](const Jet& z) { return sqr(jacobi(z, mod).dn); }},
      {5.0 + m - 2.0 * d.root43, cd_form(-2.0 - d.root43)},
      {5.0 + 2.0 * m - 2.0 * d.delta4, sd_form(-2.0 - m - d.delta4)},
      {5.0 + 2.0 * m + 2.0 * d.delta4, sd_form(-2.0 - m + d.delta4)},
      {5.0 + m + 2.0 * d.root43, cd_form(-2.0 + d.root43)},
  };
}

}  // namespace forms

/// Closed-form edges of the real (a, b) potential, if tabulated.
inline std::optional<EdgeList> real_closed_form_edges(int a, int b, const Modulus& mod) {
  if (b == 0 && a == 1) return forms::lame_a1(mod);
  if (b == 0 && a == 3) return forms::lame_a3(mod);
  if (a == 2 && b == 1) return forms::associated_21(mod);
  return std::nullopt;
}

}  // namespace ptlame

#endif  // PTLAME_CLOSED_FORMS_HPP
