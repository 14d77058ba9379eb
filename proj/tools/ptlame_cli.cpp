// ptlame: tabulate and verify PT-invariant Lame-family potentials.
//
//   ptlame sample-potential --a 3 --pt --shift-zero
//   ptlame edges --a 2 --b 1 --pt --shift-zero
//   ptlame scan --a 3 --pt --paired
//   ptlame dispersion --a 1 --pt --shift-zero --emin 0 --emax 3
//   ptlame selfcheck
//
// Exit codes: 0 ok, 2 configuration error, 3 verification failure,
// 1 anything else (e.g. an integration failure).

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ptlame/checks.hpp"
#include "table_output.hpp"

namespace {

using namespace ptlame;
using cli::Cell;
using cli::Metadata;
using cli::Table;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

enum class Op { PT, Partner };

struct RunConfig {
  int a = 3;
  int b = 0;
  double m = 0.75;
  double beta = 0.5;
  std::vector<Op> ops;
  bool shift_zero = false;
  std::optional<double> emin;
  std::optional<double> emax;
  std::optional<int> n;
  std::string format = "csv";
  std::string out;
  double tol = 1e-6;
  bool paired = false;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string ops_string(const std::vector<Op>& ops) {
  std::string s;
  for (Op op : ops) s += (s.empty() ? "" : "+") + std::string(op == Op::PT ? "pt" : "partner");
  return s.empty() ? "none" : s;
}

/// Lowest band edge: closed form when available, otherwise Floquet.
double ground_energy(const PotentialSpec& spec) {
  if (const auto& e = spec.closed_form_edges(); e && !e->empty()) return e->front().energy;
  EdgeSearchOptions opt;
  opt.workers = worker_count();
  const auto r = find_band_edges(spec, opt);
  const auto s = r.simple_edges();
  if (s.empty()) throw ConfigError("could not locate the lowest band edge of " + spec.describe());
  return s.front().energy;
}

PotentialSpec ground_zeroed(const PotentialSpec& spec) {
  if (spec.closed_form_edges()) return shifted_to_zero(spec);
  return shifted(spec, ground_energy(spec));
}

PotentialSpec build_spec(const RunConfig& c) {
  if (c.b < 0 || c.a < 1) throw ConfigError("need a >= 1 and b >= 0");
  auto spec = PotentialSpec::associated_lame(c.a, c.b, c.m);
  for (Op op : c.ops) {
    if (op == Op::PT)
      spec = pt_transform(spec, c.beta);
    else
      spec = susy_partner(ground_zeroed(spec));
  }
  if (c.shift_zero) spec = ground_zeroed(spec);
  return spec;
}

Metadata base_metadata(const std::string& command, const RunConfig& c,
                       const FloquetOptions& fo) {
  return {{"command", command},
          {"a", static_cast<long long>(c.a)},
          {"b", static_cast<long long>(c.b)},
          {"m", c.m},
          {"beta", c.beta},
          {"ops", ops_string(c.ops)},
          {"shift_zero", static_cast<long long>(c.shift_zero)},
          {"tol", c.tol},
          {"rtol", fo.rtol},
          {"atol", fo.atol}};
}

void emit(const RunConfig& c, const Table& t, const Metadata& meta, const Metadata& trailer = {}) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!c.out.empty()) {
    file.open(c.out, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file " + c.out);
    os = &file;
  }
  if (c.format == "json")
    t.write_json(*os, meta, trailer);
  else
    t.write_csv(*os, meta, trailer);
}

std::pair<double, double> energy_range(const RunConfig& c, const PotentialSpec& spec) {
  auto [lo, hi] = default_energy_range(spec);
  if (c.emin) lo = *c.emin;
  if (c.emax) hi = *c.emax;
  if (!(lo < hi)) throw ConfigError("need emin < emax");
  return {lo, hi};
}

// ---------------------------------------------------------------------------

int cmd_sample_potential(const RunConfig& c) {
  const auto spec = build_spec(c);
  const int n = c.n.value_or(400);
  if (n < 2) throw ConfigError("--n must be at least 2");
  const double L = spec.period();
  Table t({"x", "re_v", "im_v"});
  for (int k = 0; k < 2 * n; ++k) {
    const double x = L * (k - n) / n;  // exact 0 at k = n
    const cplx v = eval(spec, x);
    t.add_row({x, v.real(), v.imag()});
  }
  auto meta = base_metadata("sample-potential", c, {});
  meta.emplace_back("period", L);
  meta.emplace_back("points_per_period", static_cast<long long>(n));
  emit(c, t, meta);
  return kExitOk;
}

int cmd_edges(const RunConfig& c) {
  const auto spec = build_spec(c);
  const auto [lo, hi] = energy_range(c, spec);
  EdgeSearchOptions opt;
  opt.workers = worker_count();
  const auto found = find_band_edges(spec, lo, hi, opt);
  const auto numeric = found.simple_edges();
  std::vector<double> analytic;
  if (const auto& e = spec.closed_form_edges())
    for (const auto& f : *e) analytic.push_back(f.energy);

  Table t({"index", "energy_analytic", "energy_numeric", "abs_diff", "discriminant",
           "period_class"});
  const std::size_t rows = std::max(numeric.size(), analytic.size());
  double worst = 0.0;
  bool complete = analytic.empty() || analytic.size() == numeric.size();
  for (std::size_t j = 0; j < rows; ++j) {
    Cell ea, en, diff, disc, cls;
    if (j < analytic.size()) ea = analytic[j];
    if (j < numeric.size()) {
      en = numeric[j].energy;
      disc = numeric[j].discriminant.real();
      cls = std::string(1, to_char(numeric[j].period_class));
    }
    if (j < analytic.size() && j < numeric.size()) {
      const double d = std::abs(analytic[j] - numeric[j].energy);
      worst = std::max(worst, d);
      diff = d;
    }
    t.add_row({static_cast<long long>(j), ea, en, diff, disc, cls});
  }
  const bool checked = !analytic.empty();
  const bool pass = !checked || (complete && worst <= c.tol);
  auto meta = base_metadata("edges", c, opt.floquet);
  meta.emplace_back("emin", lo);
  meta.emplace_back("emax", hi);
  Metadata trailer{{"verdict", std::string(!checked ? "NUMERIC-ONLY" : pass ? "PASS" : "FAIL")},
                   {"max_abs_diff", checked ? Cell(worst) : Cell{}},
                   {"analytic_count", static_cast<long long>(analytic.size())},
                   {"numeric_count", static_cast<long long>(numeric.size())},
                   {"closed_gaps", static_cast<long long>(found.closed_gaps().size())}};
  emit(c, t, meta, trailer);
  for (const auto& w : found.warnings) std::cerr << "warning: " << w << '\n';
  return pass ? kExitOk : kExitVerification;
}

int cmd_scan(const RunConfig& c) {
  const auto spec = build_spec(c);
  const auto [lo, hi] = energy_range(c, spec);
  const int n = c.n.value_or(400);
  if (n < 2) throw ConfigError("--n must be at least 2");
  const auto scan = discriminant_scan(spec, lo, hi, static_cast<std::size_t>(n), {},
                                      worker_count());
  auto meta = base_metadata("scan", c, {});
  meta.emplace_back("emin", lo);
  meta.emplace_back("emax", hi);
  meta.emplace_back("n", static_cast<long long>(n));

  if (!c.paired) {
    Table t({"e", "re_delta", "im_delta"});
    for (std::size_t i = 0; i < scan.energies.size(); ++i)
      t.add_row({scan.energies[i], scan.discriminants[i].real(), scan.discriminants[i].imag()});
    emit(c, t, meta,
         {{"max_abs_im_delta", scan.max_imag},
          {"pt_breaking", static_cast<long long>(scan.pt_breaking)},
          {"gaps", static_cast<long long>(scan.gap_count())}});
    return kExitOk;
  }

  // paired scan against the real Lame potential at 1 - m
  if (c.b != 0 || c.ops.size() != 1 || c.ops.front() != Op::PT || c.shift_zero)
    throw ConfigError("--paired needs a plain PT Lame spec (--pt, b = 0, no shift or partner)");
  const auto dual = PotentialSpec::lame(c.a, 1.0 - c.m);
  const double n_a = c.a * (c.a + 1);
  std::vector<cplx> dual_delta(scan.energies.size());
  detail::parallel_for(scan.energies.size(), worker_count(), [&](std::size_t i) {
    dual_delta[i] = monodromy(dual, scan.energies[i] + n_a).discriminant;
  });
  Table t({"e", "re_delta", "im_delta", "re_delta_dual", "im_delta_dual", "abs_diff"});
  double worst = 0.0;
  for (std::size_t i = 0; i < scan.energies.size(); ++i) {
    const double d = std::abs(scan.discriminants[i] - dual_delta[i]);
    worst = std::max(worst, d);
    t.add_row({scan.energies[i], scan.discriminants[i].real(), scan.discriminants[i].imag(),
               dual_delta[i].real(), dual_delta[i].imag(), d});
  }
  const bool pass = worst <= c.tol;
  emit(c, t, meta,
       {{"verdict", std::string(pass ? "PASS" : "FAIL")},
        {"max_abs_diff", worst},
        {"max_abs_im_delta", scan.max_imag},
        {"pt_breaking", static_cast<long long>(scan.pt_breaking)},
        {"gaps", static_cast<long long>(scan.gap_count())}});
  return pass ? kExitOk : kExitVerification;
}

int cmd_dispersion(const RunConfig& c) {
  const auto spec = build_spec(c);
  const auto [lo, hi] = energy_range(c, spec);
  const int n = c.n.value_or(400);
  if (n < 2) throw ConfigError("--n must be at least 2");
  const bool analytic = c.a == 1 && c.b == 0 && c.ops.size() == 1 && c.ops.front() == Op::PT;
  // the analytic relation is written for the ground-zeroed potential
  const double offset = analytic ? spec.closed_form_edges()->front().energy : 0.0;
  const double L = spec.period();

  std::vector<double> energies(n);
  std::vector<cplx> delta(n);
  for (int i = 0; i < n; ++i) energies[i] = lo + (hi - lo) * i / (n - 1);
  detail::parallel_for(energies.size(), worker_count(), [&](std::size_t i) {
    delta[i] = monodromy(spec, energies[i]).discriminant;
  });

  Table t({"e", "k_numeric_re", "k_numeric_im", "k_analytic_re", "k_analytic_im", "abs_diff"});
  double worst = 0.0;
  int compared = 0;
  for (int i = 0; i < n; ++i) {
    const cplx kn = wavenumber_from_discriminant(delta[i], L);
    Cell ka_re, ka_im, diff;
    if (analytic) {
      try {
        const auto p = dispersion_analytic(c.m, c.beta, energies[i] - offset);
        ka_re = p.k.real();
        ka_im = p.k.imag();
        const double d = std::abs(p.k - kn);
        diff = d;
        // k ~ sqrt(E - E_edge) amplifies discriminant errors at the edges,
        // so only rows inside a band enter the verdict
        if (std::abs(0.5 * delta[i].real()) < 1.0 - 1e-6) {
          worst = std::max(worst, d);
          ++compared;
        }
      } catch (const BranchError&) {
        // in a gap: no real k
      }
    }
    t.add_row({energies[i], kn.real(), kn.imag(), ka_re, ka_im, diff});
  }
  auto meta = base_metadata("dispersion", c, {});
  meta.emplace_back("emin", lo);
  meta.emplace_back("emax", hi);
  meta.emplace_back("n", static_cast<long long>(n));
  meta.emplace_back("period", L);
  const bool pass = worst <= c.tol;
  Metadata trailer;
  if (analytic) {
    trailer = {{"verdict", std::string(pass ? "PASS" : "FAIL")},
               {"max_abs_diff_in_band", worst},
               {"in_band_rows", static_cast<long long>(compared)}};
  }
  emit(c, t, meta, trailer);
  return pass ? kExitOk : kExitVerification;
}

int cmd_selfcheck(const RunConfig& c) {
  // validate the parameters the suite will use before running anything
  (void)pt_ground_zeroed(3, 0, c.m, c.beta);
  (void)pt_ground_zeroed(2, 1, c.m, c.beta);
  checks::CheckOptions opt;
  opt.m = c.m;
  opt.beta = c.beta;
  opt.floquet_tol = c.tol;
  opt.workers = worker_count();
  const auto results = checks::full_suite(opt);

  bool all = true;
  Table t({"check", "value", "tolerance", "relation", "result"});
  for (const auto& r : results) {
    all = all && r.pass;
    t.add_row({r.name, r.value, r.tolerance, std::string(r.lower_bound ? ">" : "<"),
               std::string(r.pass ? "PASS" : "FAIL")});
  }
  for (const auto& r : results) {
    std::printf("%-4s  %-80s %10.3e %s %8.1e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.value, r.lower_bound ? ">" : "<", r.tolerance);
  }
  std::printf("%s: %zu checks\n", all ? "ALL PASS" : "FAILURES", results.size());
  if (!c.out.empty()) {
    FloquetOptions fo;
    emit(c, t, base_metadata("selfcheck", c, fo),
         {{"verdict", std::string(all ? "PASS" : "FAIL")}});
  }
  return all ? kExitOk : kExitVerification;
}

struct Handles {
  CLI::Option* pt = nullptr;
  CLI::Option* partner = nullptr;
};

Handles add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--a", c.a, "Lame index a")->capture_default_str();
  sub->add_option("--b", c.b, "associated index b (0 for plain Lame)")->capture_default_str();
  sub->add_option("--m", c.m, "elliptic parameter m in (0,1)")->capture_default_str();
  sub->add_option("--beta", c.beta, "shift beta in x -> ix + beta")->capture_default_str();
  Handles h;
  h.pt = sub->add_flag("--pt", "apply the PT transform (order-sensitive with --partner)");
  h.partner = sub->add_flag("--partner", "take the SUSY partner (order-sensitive with --pt)");
  sub->add_flag("--shift-zero", c.shift_zero, "shift so the lowest band edge is at zero");
  sub->add_option("--emin", c.emin, "lower end of the energy range");
  sub->add_option("--emax", c.emax, "upper end of the energy range");
  sub->add_option("--n", c.n, "number of samples");
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--tol", c.tol, "verification tolerance")->capture_default_str();
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure of PT-invariant Lame-family potentials"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::pair<CLI::App*, Handles>> subs;
  auto* sample = app.add_subcommand("sample-potential", "tabulate V(x) over two periods");
  subs.emplace_back(sample, add_common(sample, cfg));
  auto* edges = app.add_subcommand("edges", "band edges: closed form vs Floquet");
  subs.emplace_back(edges, add_common(edges, cfg));
  auto* scan = app.add_subcommand("scan", "discriminant scan");
  subs.emplace_back(scan, add_common(scan, cfg));
  scan->add_flag("--paired", cfg.paired,
                 "also scan the real Lame potential at 1-m shifted by a(a+1)");
  auto* disp = app.add_subcommand("dispersion", "Bloch wavenumber k(E)");
  subs.emplace_back(disp, add_common(disp, cfg));
  auto* self = app.add_subcommand("selfcheck", "run the invariant suite");
  subs.emplace_back(self, add_common(self, cfg));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (auto& [sub, h] : subs) {
      if (!sub->parsed()) continue;
      for (const CLI::Option* o : sub->parse_order()) {
        if (o == h.pt) cfg.ops.push_back(Op::PT);
        if (o == h.partner) cfg.ops.push_back(Op::Partner);
      }
      if (sub == sample) return cmd_sample_potential(cfg);
      if (sub == edges) return cmd_edges(cfg);
      if (sub == scan) return cmd_scan(cfg);
      if (sub == disp) return cmd_dispersion(cfg);
      if (sub == self) return cmd_selfcheck(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SpecError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
