#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ptlame/checks.hpp"
#include "ptlame/elliptic.hpp"

namespace {

using namespace ptlame;

constexpr double kModuliList[] = {0.1, 0.25, 0.5, 0.75, 0.9};

TEST(CompleteK, SmallParameterLimit) {
  EXPECT_NEAR(complete_K(1e-15), kPi / 2.0, 1e-12);
}

TEST(CompleteK, QuarterParameterGivesKnownPeriod) {
  EXPECT_NEAR(complete_K(0.25), 1.68575, 5e-6);
  EXPECT_NEAR(2.0 * Modulus(0.75).Kprime(), 3.3715, 5e-5);
}

TEST(CompleteK, RejectsEndpoints) {
  EXPECT_THROW(complete_K(1.0), DomainError);
  EXPECT_THROW(complete_K(0.0), DomainError);
  EXPECT_THROW(complete_K(-0.2), DomainError);
  EXPECT_THROW(Modulus(1.5), DomainError);
}

TEST(CompleteK, MatchesLongDoubleAgm) {
  for (double m : kModuliList)
    EXPECT_NEAR(complete_K(m), oracle::detail::K_long_double(m), 1e-14 * complete_K(m));
}

TEST(Modulus, Invariants) {
  for (double m : kModuliList) {
    const Modulus mod(m);
    EXPECT_GT(mod.K(), 0.0);
    EXPECT_GT(mod.Kprime(), 0.0);
    EXPECT_GT(mod.q(), 0.0);
    EXPECT_LT(mod.q(), 1.0);
    EXPECT_NEAR(mod.Kprime(), Modulus(1.0 - m).K(), 1e-13 * mod.Kprime());
    EXPECT_NEAR(mod.q(), std::exp(-kPi * mod.Kprime() / mod.K()), 1e-15);
  }
}

TEST(JacobiReal, SpecialValues) {
  for (double m : kModuliList) {
    const Modulus mod(m);
    const auto z = jacobi_real(0.0, mod);
    EXPECT_EQ(z.sn, cplx(0.0));
    EXPECT_EQ(z.cn, cplx(1.0));
    EXPECT_EQ(z.dn, cplx(1.0));
    const auto k = jacobi_real(mod.K(), mod);
    EXPECT_NEAR(std::abs(k.sn - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(k.cn), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(k.dn - std::sqrt(1.0 - m)), 0.0, 1e-12);
  }
}

TEST(JacobiReal, MatchesMaclaurinSeries) {
  const auto ref = oracle::maclaurin(0.7, 0.75);
  const auto j = jacobi_real(0.7, 0.75);
  EXPECT_NEAR(std::abs(j.sn - ref.sn), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(j.cn - ref.cn), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(j.dn - ref.dn), 0.0, 1e-12);
}

TEST(JacobiReal, MatchesOdeOverSeveralPeriods) {
  for (double m : kModuliList)
    for (double u : {-7.3, -1.1, 2.9, 5.5, 11.0}) {
      const auto ref = oracle::ode(u, m);
      const auto j = jacobi_real(u, m);
      EXPECT_NEAR(std::abs(j.sn - ref.sn), 0.0, 1e-11) << "m=" << m << " u=" << u;
      EXPECT_NEAR(std::abs(j.dn - ref.dn), 0.0, 1e-11) << "m=" << m << " u=" << u;
    }
}

TEST(JacobiComplex, RealAxisReducesToRealKernel) {
  for (double m : kModuliList)
    for (double x : {0.4, -1.3, 3.7, 9.2}) {
      const auto c = jacobi_complex(x, m);
      const auto r = jacobi_real(x, m);
      EXPECT_NEAR(std::abs(c.sn - r.sn), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(c.cn - r.cn), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(c.dn - r.dn), 0.0, 1e-13);
    }
}

TEST(JacobiComplex, MatchesSeriesAndOdeAtSamplePoint) {
  const cplx z(0.3, 0.4);
  const auto j = jacobi_complex(z, 0.75);
  for (const auto& ref : {oracle::maclaurin(z, 0.75), oracle::ode(z, 0.75)}) {
    EXPECT_NEAR(std::abs(j.sn - ref.sn), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(j.cn - ref.cn), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(j.dn - ref.dn), 0.0, 1e-10);
  }
}

TEST(JacobiComplex, MatchesOdeOnGrid) {
  double worst = 0.0;
  for (double m : kModuliList) {
    const Modulus mod(m);
    for (cplx z : checks::complex_grid(mod)) {
      const auto j = jacobi_complex(z, mod);
      const auto ref = oracle::ode(z, m);
      worst = std::max({worst, std::abs(j.sn - ref.sn), std::abs(j.cn - ref.cn),
                        std::abs(j.dn - ref.dn)});
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(JacobiComplex, AlgebraicIdentitiesOnGrid) {
  const auto r = checks::elliptic_identities();
  EXPECT_TRUE(r.pass) << r.value;
}

TEST(JacobiComplex, DoublePeriodicity) {
  for (double m : kModuliList) {
    const Modulus mod(m);
    for (cplx z : {cplx(0.3, 0.2), cplx(-1.1, 0.7), cplx(2.0, -0.5)}) {
      const cplx s = jacobi_complex(z, mod).sn;
      EXPECT_NEAR(std::abs(jacobi_complex(z + 4.0 * mod.K(), mod).sn - s), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(jacobi_complex(z + 2.0 * kI * mod.Kprime(), mod).sn - s), 0.0, 1e-10);
    }
  }
}

TEST(JacobiComplex, PoleGuardReportsLatticePoint) {
  const Modulus mod(0.75);
  const cplx pole(2.0 * mod.K(), 3.0 * mod.Kprime());
  try {
    jacobi_complex(pole + cplx(1e-8, 0.0), mod);
    FAIL() << "expected PoleError";
  } catch (const PoleError& e) {
    EXPECT_NEAR(std::abs(e.point() - pole), 0.0, 1e-12);
  }
  EXPECT_NO_THROW(jacobi_complex(pole + cplx(1e-3, 0.0), mod));
}

TEST(JacobiComplex, DerivativeMatchesCentralDifference) {
  const double h = 1e-5;
  for (double m : kModuliList) {
    const Modulus mod(m);
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.8, 0.9), cplx(1.7, -0.4)}) {
      const auto j = jacobi_complex(z, mod);
      const cplx fd =
          (jacobi_complex(z + h, mod).sn - jacobi_complex(z - h, mod).sn) / (2.0 * h);
      EXPECT_NEAR(std::abs(fd - j.cn * j.dn), 0.0, 1e-8);
    }
  }
}

TEST(JacobiJets, DerivativesFollowTheJacobiSystem) {
  const Modulus mod(0.6);
  const cplx z0(0.4, 0.3);
  const auto j = jacobi(Jet::variable(z0, 3), mod);
  const auto v = jacobi_complex(z0, mod);
  EXPECT_NEAR(std::abs(j.sn.value() - v.sn), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(j.sn.derivative(1) - v.cn * v.dn), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(j.cn.derivative(1) + v.sn * v.dn), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(j.dn.derivative(1) + 0.6 * v.sn * v.cn), 0.0, 1e-13);
  // sn'' = -(1+m) sn + 2m sn^3
  EXPECT_NEAR(std::abs(j.sn.derivative(2) - (-(1.6) * v.sn + 1.2 * v.sn * v.sn * v.sn)), 0.0,
              1e-12);
}

TEST(JacobiComplex, ComplementaryDnIdentity) {
  // sqrt(m) sn(x, m) = -dn(ix + K' + iK, 1 - m): the minus sign holds
  const Modulus mod(0.5), dual(0.5);
  for (double x : {0.1, 0.5, 1.0}) {
    const cplx z = kI * x + mod.Kprime() + kI * mod.K();
    EXPECT_NEAR(std::abs(std::sqrt(0.5) * jacobi_real(x, mod).sn + jacobi_complex(z, dual).dn),
                0.0, 1e-10);
  }
  const auto grid = checks::complementary_dn_identity();
  EXPECT_TRUE(grid.pass) << grid.value;
}

TEST(Theta, EtaIsOddAndAntiperiodic) {
  const ThetaBundle tb(Modulus(0.5));
  EXPECT_EQ(theta_functions(tb, cplx(0.0)).H, cplx(0.0));
  const cplx u = 0.3;
  const cplx shifted = theta_functions(tb, u + 2.0 * tb.modulus().K()).H;
  EXPECT_NEAR(std::abs(shifted + theta_functions(tb, u).H), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(theta_functions(tb, -u).H + theta_functions(tb, u).H), 0.0, 1e-15);
}

TEST(Theta, TruncationIsShort) {
  for (double m : kModuliList) {
    const ThetaBundle tb{Modulus(m)};
    EXPECT_GE(tb.truncation(), 1);
    EXPECT_LE(tb.truncation(), 12);
  }
}

TEST(Theta, QuotientGivesSn) {
  for (double m : {0.3, 0.75}) {
    const Modulus mod(m);
    const ThetaBundle tb(mod);
    for (cplx u : {cplx(0.3, 0.1), cplx(1.2, -0.6), cplx(0.5, 1.0)}) {
      const auto t = theta_functions(tb, u);
      const cplx sn = t.H / (std::pow(m, 0.25) * t.Theta);
      EXPECT_NEAR(std::abs(sn - jacobi_complex(u, mod).sn), 0.0, 1e-12);
    }
  }
}

TEST(Theta, ImaginaryQuasiPeriodFactor) {
  const Modulus mod(0.75);
  const ThetaBundle tb(mod);
  const double x = 0.2, beta = 0.5;
  const cplx u = kI * x + beta;
  const cplx ratio = theta_functions(tb, u + 2.0 * kI * mod.Kprime()).H / theta_functions(tb, u).H;
  const cplx factor = -std::exp(-kI * kPi * u / mod.K()) / mod.q();
  EXPECT_NEAR(std::abs(ratio / factor - 1.0), 0.0, 1e-10);
  // modulus of the factor grows with x: exp(pi K'/K) exp(pi x/K)
  EXPECT_NEAR(std::abs(ratio),
              std::exp(kPi * mod.Kprime() / mod.K()) * std::exp(kPi * x / mod.K()),
              1e-9 * std::abs(ratio));
  const auto grid = checks::eta_quasi_periodicity();
  EXPECT_TRUE(grid.pass) << grid.value;
}

TEST(Zeta, OddPeriodicAndZeroAtK) {
  const Modulus mod(0.5);
  const ThetaBundle tb(mod);
  EXPECT_NEAR(std::abs(zeta_Z(tb, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(zeta_Z(tb, 0.4 + 2.0 * mod.K()) - zeta_Z(tb, 0.4)), 0.0, 1e-11);
  EXPECT_NEAR(std::abs(zeta_Z(tb, mod.K())), 0.0, 1e-11);
}

TEST(Zeta, MatchesLogDerivativeByDifferences) {
  const ThetaBundle tb(Modulus(0.75));
  const double h = 1e-5;
  for (cplx u : {cplx(0.3, 0.2), cplx(1.0, -0.5)}) {
    const cplx fd = (std::log(theta_functions(tb, u + h).Theta) -
                     std::log(theta_functions(tb, u - h).Theta)) /
                    (2.0 * h);
    EXPECT_NEAR(std::abs(fd - zeta_Z(tb, u)), 0.0, 1e-8);
  }
}

TEST(Zeta, RejectsThetaZero) {
  const Modulus mod(0.75);
  const ThetaBundle tb(mod);
  EXPECT_THROW(zeta_Z(tb, kI * mod.Kprime()), PoleError);
}

TEST(InverseSn, SpecialValues) {
  const Modulus mod(0.75);
  EXPECT_NEAR(std::abs(inverse_sn(0.0, mod)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(inverse_sn(1.0, mod) - mod.K()), 0.0, 1e-10);
}

TEST(InverseSn, RoundTripAndFundamentalRectangle) {
  const Modulus mod(0.75);
  const double K = mod.K(), Kp = mod.Kprime();
  const cplx w = std::sqrt(cplx(0.3 / 0.75));
  const cplx a = inverse_sn(w, mod);
  const cplx sn = jacobi_complex(a, mod).sn;
  EXPECT_NEAR(std::abs(0.75 * sn * sn - 0.3), 0.0, 1e-10);
  for (cplx v : {cplx(0.3, 0.2), cplx(-2.0, 0.5), cplx(4.0, 0.0), cplx(0.1, -0.7),
                 cplx(1.3, 0.0), cplx(-0.5, 3.0)}) {
    const cplx al = inverse_sn(v, mod);
    EXPECT_NEAR(std::abs(jacobi_complex(al, mod).sn - v), 0.0, 1e-10 * std::max(1.0, std::abs(v)));
    EXPECT_GE(al.real(), -K - 1e-12);
    EXPECT_LE(al.real(), K + 1e-12);
    if (v.imag() >= 0.0) {
      EXPECT_GE(al.imag(), -1e-12);
      EXPECT_LE(al.imag(), Kp + 1e-12);
    } else {
      EXPECT_LE(al.imag(), 1e-12);
      EXPECT_GE(al.imag(), -Kp - 1e-12);
    }
  }
}

TEST(InverseSn, AboveOneOverKLandsOnTopEdge) {
  // sn(t + iK') = 1/(k sn t), so w > 1/k maps to Im alpha = K'
  const Modulus mod(0.75);
  const cplx a = inverse_sn(2.0, mod);
  EXPECT_NEAR(a.imag(), mod.Kprime(), 1e-9);
}

TEST(Landen, DescendedParameters) {
  const auto l = landen_descend(0.75);
  EXPECT_NEAR(l.alpha, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(l.m_tilde, 1.0 / 9.0, 1e-15);
  const auto small = landen_descend(1e-12);
  EXPECT_NEAR(small.alpha, 0.5, 1e-12);
  EXPECT_NEAR(small.m_tilde, 0.0, 1e-12);
  for (double m : kModuliList) EXPECT_LT(landen_descend(m).m_tilde, m);
}

TEST(Landen, DnSumIdentity) {
  const double m = 0.6, x = 0.37;
  const Modulus mod(m);
  const auto l = landen_descend(m);
  const double lhs = (jacobi_real(x, mod).dn + jacobi_real(x + mod.K(), mod).dn).real();
  const double rhs = jacobi_real(x / l.alpha, l.m_tilde).dn.real() / l.alpha;
  EXPECT_NEAR(lhs, rhs, 1e-11);
}

}  // namespace
