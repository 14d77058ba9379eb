// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptlame/checks.hpp"

namespace {

using namespace ptlame;
using checks::CheckResult;

struct Criterion {
  int number;
  std::string title;
  std::vector<CheckResult> checks;
};

CheckResult jacobi_vs_ode_oracle() {
  double worst = 0.0;
  for (double m : checks::kModuli) {
    const Modulus mod(m);
    for (cplx z : checks::complex_grid(mod)) {
      const auto lib = jacobi_complex(z, mod);
      const auto ref = oracle::ode(z, m);
      worst = std::max({worst, std::abs(lib.sn - ref.sn), std::abs(lib.cn - ref.cn),
                        std::abs(lib.dn - ref.dn)});
    }
  }
  return checks::below("jacobi_complex vs complex ODE oracle on the 50x5 grid", worst, 1e-10);
}

int report(const Criterion& c) {
  bool pass = !c.checks.empty();
  for (const auto& r : c.checks) pass = pass && r.pass;
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str());
  for (const auto& r : c.checks) {
    std::printf("    [%s] %s: %.3e %s %.1e%s%s\n", r.pass ? "ok" : "xx", r.name.c_str(), r.value,
                r.lower_bound ? ">" : "<", r.tolerance, r.detail.empty() ? "" : "  ",
                r.detail.c_str());
  }
  std::fflush(stdout);
  return pass ? 0 : 1;
}

}  // namespace

int main() {
  const checks::CheckOptions opt;  // m = 0.75, beta = 0.5, Floquet tolerance 1e-6
  int failures = 0;
  auto run = [&](int n, std::string title, auto make) {
    Criterion c{n, std::move(title), {}};
    try {
      c.checks = make();
    } catch (const std::exception& e) {
      c.checks.push_back({"exception", 0.0, 0.0, false, e.what()});
    }
    failures += report(c);
  };

  run(1, "elliptic identities and ODE oracle on a pole-avoiding complex grid", [] {
    return std::vector<CheckResult>{checks::elliptic_identities(), jacobi_vs_ode_oracle()};
  });
  run(2, "period 2K'(0.75) reproduction", [] { return checks::period_reproduction(); });
  run(3, "a=3 PT band edges at m=0.75 by Floquet, classes PAAPPAA",
      [&] { return std::vector<CheckResult>{checks::a3_pt_edges(opt)}; });
  run(4, "(2,1) PT band edges at m=0.75 by Floquet, classes PAAPP",
      [&] { return std::vector<CheckResult>{checks::assoc21_pt_edges(opt)}; });
  run(5, "tabulated eigenfunction residuals",
      [&] { return std::vector<CheckResult>{checks::eigenfunction_residuals(opt)}; });
  run(6, "modulus duality, half-modulus sum rule and PT duality",
      [&] { return checks::dualities(opt); });
  run(7, "discriminant relation for a=1 and a=3", [&] {
    return std::vector<CheckResult>{checks::discriminant_relation(1, opt),
                                    checks::discriminant_relation(3, opt)};
  });
  run(8, "a=1 dispersion and Bloch closed form", [&] { return checks::dispersion(opt); });
  run(9, "supersymmetric structure", [&] {
    std::vector<CheckResult> out{checks::susy_factorization(opt), checks::partner_isospectral(opt),
                                 checks::a1_self_isospectral(opt)};
    for (auto& r : checks::a3_order_exchange(opt)) out.push_back(std::move(r));
    out.push_back(checks::assoc21_not_self_isospectral(opt));
    return out;
  });
  run(10, "antiperiodic edges present in the a=3 PT spectrum",
      [&] { return std::vector<CheckResult>{checks::antiperiodic_edges_exist(opt)}; });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
