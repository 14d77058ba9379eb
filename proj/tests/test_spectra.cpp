#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ptlame/floquet.hpp"
#include "ptlame/spectra.hpp"

namespace {

using namespace ptlame;

constexpr double kM = 0.75;
constexpr double kBeta = 0.5;

std::string classes(const std::vector<BandEdge>& edges) {
  std::string s;
  for (const auto& e : edges) s += to_char(e.period_class);
  return s;
}

TEST(EdgeConstants, PositiveOnTheOpenInterval) {
  for (double m = 0.01; m < 1.0; m += 0.07) {
    const EdgeConstants d(m);
    for (double v : {d.delta1, d.delta2, d.delta3, d.delta4, d.root43}) EXPECT_GT(v, 0.0) << m;
  }
  const EdgeConstants d(kM);
  EXPECT_DOUBLE_EQ(d.delta3, 1.0);
  EXPECT_DOUBLE_EQ(d.delta1, std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(d.delta2, std::sqrt(3.8125));
  EXPECT_DOUBLE_EQ(d.delta4, std::sqrt(0.8125));
}

TEST(A3Edges, ReferenceEnergiesAndClasses) {
  const auto edges = lame_pt_edges_a3(kM, kBeta);
  ASSERT_EQ(edges.size(), 7u);
  const double reference[] = {0.0, 0.3448, 1.8377, 3.75, 4.0, 8.1552, 8.1623};
  // the four-decimal values are truncated, not rounded
  for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(edges[j].energy, reference[j], 1e-4) << j;
  EXPECT_EQ(classes(edges), "PAAPPAA");
  const EdgeConstants d(kM);
  EXPECT_NEAR(edges[1].energy, 2.25 + 2.0 - 2.0 * d.delta2, 1e-15);
  EXPECT_NEAR(edges[6].energy, 5.0 + 2.0 * d.delta1, 1e-14);
  for (std::size_t j = 1; j < 7; ++j) EXPECT_LT(edges[j - 1].energy, edges[j].energy);
  for (const auto& e : edges) EXPECT_FALSE(e.gap_closed);
}

TEST(A3Edges, AscendingAndClassifiedAtOtherModuli) {
  for (double m : {0.1, 0.3, 0.5, 0.9}) {
    const auto edges = lame_pt_edges_a3(m, 0.4);
    for (std::size_t j = 1; j < edges.size(); ++j) EXPECT_LE(edges[j - 1].energy, edges[j].energy);
    EXPECT_EQ(edges.front().energy, 0.0);
    EXPECT_EQ(classes(edges), "PAAPPAA") << m;
  }
}

TEST(AssociatedEdges, FormulasAndClasses) {
  const auto edges = assoc_pt_edges_21(kM, kBeta);
  ASSERT_EQ(edges.size(), 5u);
  const double r = std::sqrt(1.75), d4 = std::sqrt(0.8125);
  const double expected[] = {0.0, 2.0 * r - kM - 2.0 * d4, 2.0 * r - kM + 2.0 * d4, 4.0 * r,
                             5.0 - 3.0 * kM + 2.0 * r};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(edges[j].energy, expected[j], 1e-14) << j;
  EXPECT_EQ(classes(edges), "PAAPP");
  // top row is dn^2 of ix + beta
  const auto top = edges[4];
  const auto j0 = jacobi_complex(kI * 0.3 + kBeta, Modulus(kM));
  const auto j1 = jacobi_complex(kI * 1.1 + kBeta, Modulus(kM));
  EXPECT_NEAR(std::abs(top.eigenfunction(0.3) / top.eigenfunction(1.1) -
                       (j0.dn * j0.dn) / (j1.dn * j1.dn)),
              0.0, 1e-12);
}

TEST(A1Edges, EnergiesAndClassesFromEigenfunctions) {
  for (double m : {0.2, kM}) {
    const auto edges = lame_pt_edges_a1(m, kBeta);
    ASSERT_EQ(edges.size(), 3u);
    EXPECT_EQ(edges[0].energy, 0.0);
    EXPECT_EQ(edges[1].energy, m);
    EXPECT_EQ(edges[2].energy, 1.0);
    EXPECT_EQ(classes(edges), "PAA");
  }
}

TEST(Edges, NormalisedToUnitMaximum) {
  for (const auto& e : lame_pt_edges_a3(kM, kBeta)) {
    double mx = 0.0;
    const double L = 2.0 * Modulus(kM).Kprime();
    for (int k = 0; k < 512; ++k) mx = std::max(mx, std::abs(e.eigenfunction(2.0 * L * k / 512)));
    EXPECT_NEAR(mx, 1.0, 1e-3);
    EXPECT_LE(mx, 1.0 + 1e-12);
  }
}

TEST(Edges, ResidualAndPeriodicity) {
  struct Case {
    PotentialSpec spec;
    std::vector<BandEdge> edges;
  };
  for (double m : {0.3, kM}) {
    const std::vector<Case> cases{
        {pt_ground_zeroed(1, 0, m, kBeta), lame_pt_edges_a1(m, kBeta)},
        {pt_ground_zeroed(3, 0, m, kBeta), lame_pt_edges_a3(m, kBeta)},
        {pt_ground_zeroed(2, 1, m, kBeta), assoc_pt_edges_21(m, kBeta)},
    };
    for (const auto& c : cases) {
      for (const auto& e : c.edges) {
        EXPECT_LT(eigen_residual(e, c.spec), 1e-8) << c.spec.describe() << " E=" << e.energy;
        EXPECT_LT(periodicity_defect(e, c.spec.period()), 1e-9)
            << c.spec.describe() << " E=" << e.energy;
      }
    }
  }
}

TEST(Edges, ClosedFormBandEdgesFollowsTheSpec) {
  const auto a3 = closed_form_band_edges(pt_ground_zeroed(3, 0, kM, kBeta));
  const auto table = lame_pt_edges_a3(kM, kBeta);
  ASSERT_EQ(a3.size(), table.size());
  for (std::size_t j = 0; j < a3.size(); ++j) {
    EXPECT_NEAR(a3[j].energy, table[j].energy, 1e-12);
    EXPECT_EQ(a3[j].period_class, table[j].period_class);
  }
  // unshifted spec carries the ground energy
  const auto raw = closed_form_band_edges(pt_transform(PotentialSpec::lame(3, kM), kBeta));
  EXPECT_NEAR(raw.front().energy, pt_ground_energy(3, 0, kM), 1e-12);
  EXPECT_THROW(pt_ground_energy(2, 0, kM), SpecError);
}

TEST(EnergyMap, NegatesAndReverses) {
  const auto out = pt_energy_map({kM, 1.0, 1.0 + kM}, 1);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], -1.0 - kM);
  EXPECT_EQ(out[1], -1.0);
  EXPECT_EQ(out[2], -kM);
  const std::vector<double> in{0.1, 0.4, 0.9, 2.0, 3.5};
  EXPECT_EQ(pt_energy_map(pt_energy_map(in, 2), 2), in);
  const auto mapped = pt_energy_map(in, 2);
  for (std::size_t j = 1; j < mapped.size(); ++j) EXPECT_LT(mapped[j - 1], mapped[j]);
  EXPECT_THROW(pt_energy_map({1.0, 2.0}, 1), DomainError);
}

TEST(Duality, ModulusDualityClosedForms) {
  for (int a : {1, 3})
    for (double m : {0.3, 0.5, kM}) {
      const auto r = modulus_duality_check(a, m, EdgeSource::ClosedForm);
      EXPECT_TRUE(r.pass) << r.relation << " " << r.max_violation;
      EXPECT_EQ(r.tolerance, 1e-8);
    }
  // a = 1 by hand: E_0(m) = m and 2 - E_2(1 - m) = m
  const auto r = modulus_duality_check(1, 0.3, EdgeSource::ClosedForm);
  EXPECT_DOUBLE_EQ(r.lhs[0], 0.3);
  EXPECT_NEAR(r.rhs[0], 0.3, 1e-15);
}

TEST(Duality, ModulusDualityFloquet) {
  for (int a : {2, 3}) {
    const auto r = modulus_duality_check(a, 0.3, EdgeSource::Floquet);
    EXPECT_TRUE(r.pass) << r.relation << " " << r.max_violation;
    EXPECT_EQ(r.lhs.size(), static_cast<std::size_t>(2 * a + 1));
  }
}

TEST(Duality, HalfModulusSumRule) {
  for (int a : {1, 3}) EXPECT_TRUE(half_modulus_sum_rule(a, EdgeSource::ClosedForm).pass);
  const auto r = half_modulus_sum_rule(2, EdgeSource::Floquet);
  EXPECT_TRUE(r.pass) << r.max_violation;
  ASSERT_EQ(r.lhs.size(), 6u);
  EXPECT_NEAR(r.lhs.back(), 3.0, 1e-6);
}

TEST(Duality, PtDuality) {
  for (int a : {1, 3}) {
    const auto r = pt_duality_check(a, kM, kBeta, EdgeSource::ClosedForm);
    EXPECT_TRUE(r.pass) << r.relation << " " << r.max_violation;
  }
  const auto r = pt_duality_check(2, kM, kBeta, EdgeSource::Floquet);
  EXPECT_TRUE(r.pass) << r.relation << " " << r.max_violation;
  // composing the energy map with the modulus duality gives the same relation
  for (int a : {1, 3}) {
    const auto lame = lame_edge_energies(a, kM, EdgeSource::ClosedForm);
    const auto via_map = pt_energy_map(lame, a);
    const auto direct = pt_lame_edge_energies(a, kM, kBeta, EdgeSource::ClosedForm);
    for (std::size_t j = 0; j < direct.size(); ++j) EXPECT_NEAR(via_map[j], direct[j], 1e-12);
  }
}

TEST(Duality, MismatchedLengthsFail) {
  const auto r = detail::compare("x", {1.0, 2.0}, {1.0}, 1.0);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(std::isinf(r.max_violation));
}

TEST(Dispersion, ZoneBoundaryAtBandEdges) {
  const double L = 2.0 * Modulus(kM).Kprime();
  for (double E : {0.0, kM, 1.0}) {
    const auto p = dispersion_analytic(kM, kBeta, E);
    const double kl = std::abs(p.k.real()) * L;
    EXPECT_LT(std::min(kl, std::abs(kl - kPi)), 1e-7) << E;
    EXPECT_LT(std::abs(p.k.imag()), 1e-6);
  }
}

TEST(Dispersion, MatchesFloquetInsideBands) {
  const auto v = pt_ground_zeroed(1, 0, kM, kBeta);
  for (double E : {0.1, 0.4, 0.7, 1.05, 1.6, 2.5, 4.0}) {
    const auto p = dispersion_analytic(kM, kBeta, E);
    const cplx kn = dispersion_numeric(v, E);
    EXPECT_NEAR(std::abs(p.k.real()), kn.real(), 1e-6) << E;
    EXPECT_GE(p.k.real(), 0.0);
    EXPECT_LT(std::abs(p.k.imag()), 1e-6);
  }
}

TEST(Dispersion, GapHasNoRealBranch) {
  EXPECT_THROW(dispersion_analytic(kM, kBeta, 0.9), BranchError);
  EXPECT_THROW(dispersion_analytic(kM, kBeta, -0.5), BranchError);
}

TEST(Dispersion, ReduceToZone) {
  const double L = 2.0;
  EXPECT_NEAR(reduce_to_zone(cplx(kPi / L + 2.0 * kPi / L * 3.0), L).real(), kPi / L, 1e-12);
  EXPECT_NEAR(reduce_to_zone(cplx(-kPi / L), L).real(), kPi / L, 1e-12);
  EXPECT_NEAR(reduce_to_zone(cplx(0.3, 0.7), L).imag(), 0.7, 0.0);
}

TEST(Bloch, SolvesTheEquationWithItsFactor) {
  const auto v = pt_ground_zeroed(1, 0, kM, kBeta);
  for (double E : {0.3, 1.7}) {
    for (int s : {1, -1}) {
      const BlochSolution psi(kM, kBeta, E, s);
      const double L = psi.period();
      double res = 0.0, scale = 0.0, factor = 0.0;
      for (int k = 0; k < 40; ++k) {
        const double x = L * (k + 0.5) / 40;
        const Jet j = psi(Jet::variable(x, 2));
        res = std::max(res, std::abs(-j.derivative(2) + (eval(v, x) - E) * j.value()));
        scale = std::max(scale, std::abs(j.value()));
        factor = std::max(factor, std::abs(psi(x + L) - psi.bloch_factor() * psi(x)));
      }
      EXPECT_LT(res / scale, 1e-7) << E << " " << s;
      EXPECT_LT(factor / scale, 1e-9) << E << " " << s;
      // inside a band the factor is a pure phase
      EXPECT_NEAR(std::abs(psi.bloch_factor()), 1.0, 1e-9);
    }
    const BlochSolution plus(kM, kBeta, E, 1), minus(kM, kBeta, E, -1);
    EXPECT_NEAR(std::abs(plus.bloch_factor() * minus.bloch_factor() - 1.0), 0.0, 1e-12);
    // factor agrees with the analytic wavenumber
    const auto p = dispersion_analytic(kM, kBeta, E);
    const cplx expected = std::exp(kI * p.k * plus.period());
    const BlochSolution chosen(kM, kBeta, E, p.branch);
    EXPECT_NEAR(std::abs(chosen.bloch_factor() - expected), 0.0, 1e-9);
  }
}

TEST(Bloch, ConvenienceEvaluation) {
  const BlochSolution psi(kM, kBeta, 0.4, 1);
  EXPECT_EQ(bloch_solution_eval(kM, kBeta, 0.4, 1, 0.7), psi(0.7));
  EXPECT_EQ(psi.sign(), 1);
  EXPECT_EQ(BlochSolution(kM, kBeta, 0.4, -3).sign(), -1);
}

}  // namespace
