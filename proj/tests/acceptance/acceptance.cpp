// Acceptance suite: one pass/fail line per criterion.
//
//   sloc_acceptance               run every criterion
//   sloc_acceptance --criterion N run criterion N only
//
// The exit code is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "oracles/bloch.hpp"
#include "oracles/dense.hpp"
#include "sloc/sloc.hpp"
#include "support/csv.hpp"

using namespace sloc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

Vec2 central_site(const SiteLattice& lat) { return lat.position(lat.nearest_site(lat.center())); }

std::vector<Index> all_sites(const SiteLattice& lat) {
  std::vector<Index> v(static_cast<std::size_t>(lat.size()));
  for (Index i = 0; i < lat.size(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

// --- 1: tapering constants --------------------------------------------------

Outcome criterion_1() {
  const auto t0 = Clock::now();
  const std::map<int, double> expected{{0, 9.16}, {1, 4.56}, {2, 5.12}, {3, 5.75}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [k, target] : expected) {
    try {
      const double v = cf_fourier(TaperingProfile(TaperFamily::Beta, k));
      const bool hit = std::abs(v - target) <= 0.02;
      ok = ok && hit;
      d << "k=" << k << ": " << num(v) << " vs " << target << (hit ? "" : " (off)") << "; ";
    } catch (const ConvergenceError& e) {
      ok = false;
      d << "k=" << k << ": diverges vs " << target << "; ";
    }
  }
  const double t = seconds_since(t0);
  d << "runtime " << num(t, 3) << " s (limit 10)";
  return {ok && t < 10.0, d.str()};
}

// --- 2: minimum at k = 1 ----------------------------------------------------

Outcome criterion_2() {
  const std::vector<double> ks{0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> values;
  std::ostringstream d;
  for (double k : ks) {
    double v = std::numeric_limits<double>::infinity();
    try {
      v = cf_fourier(TaperingProfile(TaperFamily::Beta, k));
    } catch (const ConvergenceError&) {
    }
    values.push_back(v);
    d << "k=" << k << ": " << num(v) << "; ";
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  d << "argmin k=" << ks[static_cast<std::size_t>(best)];
  return {ks[static_cast<std::size_t>(best)] == 1.0, d.str()};
}

// --- 3: direct estimator limits ---------------------------------------------

Outcome criterion_3() {
  const auto t0 = Clock::now();
  std::ostringstream d;
  const Model ssh = build_ssh(200, 1.0, 0.2);
  const Vec2 xs = ssh.lattice.center();
  const double c_ssh = cf_direct(ssh.hamiltonian, ssh.lattice, xs, 60.0, TaperingProfile(TaperFamily::Beta, 1.0));
  const bool ssh_ok = c_ssh >= 2.7 && c_ssh <= 3.1;
  d << "SSH beta(1) rho=60: " << num(c_ssh) << " in [2.7, 3.1]; ";

  const Model hal = build_haldane(20, 20, HaldaneParams::haldane_default());
  const Vec2 xh = hal.lattice.center();
  const double rho = 8.0;
  const double c1 = cf_direct(hal.hamiltonian, hal.lattice, xh, rho, TaperingProfile(TaperFamily::Exp, 1.0));
  const double c8 = cf_direct(hal.hamiltonian, hal.lattice, xh, rho, TaperingProfile(TaperFamily::Exp, 8.0));
  const bool hal_ok = c8 < c1 && c8 < 2.6;
  d << "Haldane 20x20 rho=8: exp(1) " << num(c1) << ", exp(8) " << num(c8) << "; ";
  const double t = seconds_since(t0);
  d << "runtime " << num(t, 3) << " s (limit 120)";
  return {ssh_ok && hal_ok && t < 120.0, d.str()};
}

// --- 4: end-to-end localizer bound ------------------------------------------

Outcome criterion_4() {
  const auto t0 = Clock::now();
  const Model m = build_haldane(30, 30, HaldaneParams::haldane_default());
  const Vec2 x = central_site(m.lattice);
  const BoundParams params = BoundParams::from_ab(3.0 / 20.0, 0.5, 2.0);
  std::vector<double> rhos, kappas;
  for (double r = 4.0; r <= 14.0; r += 2.0) rhos.push_back(r);
  for (int i = 0; i <= 12; ++i) kappas.push_back(std::pow(10.0, -3.0 + 3.0 * i / 12.0));
  const auto cells = admissible_region_scan(m.hamiltonian, m.lattice, x, rhos, kappas, params);

  std::vector<ScanCell> admissible;
  double best_ratio = 0.0;  // largest upper/lower over the scan
  for (const ScanCell& c : cells) {
    if (c.admissible) admissible.push_back(c);
    if (c.window.lower > 0.0) best_ratio = std::max(best_ratio, c.window.upper / c.window.lower);
  }

  bool bound_ok = true;
  std::optional<Index> signature;
  const std::vector<Index> full = all_sites(m.lattice);
  for (const ScanCell& c : admissible) {
    const Probe p{x, c.rho, c.kappa, 0.0};
    for (const auto& lambda : {m.lattice.sites_within(x, c.rho), m.lattice.sites_within(x, c.rho + 4.0), full}) {
      const IndexResult r = half_signature(assemble(m.hamiltonian, m.lattice, p, lambda));
      if (r.gap_closed || r.mu < 0.5 * c.g_rho) bound_ok = false;
      if (signature && *signature != r.signature()) bound_ok = false;
      signature = r.signature();
    }
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << admissible.size() << " admissible (kappa, rho) pairs of " << cells.size()
    << " scanned (need 25); best upper/lower edge ratio " << num(best_ratio, 3);
  if (!admissible.empty()) d << "; mu >= g/2 and constant signature " << (bound_ok ? "hold" : "violated");
  d << "; runtime " << num(t, 3) << " s (limit 300)";
  return {admissible.size() >= 25 && bound_ok && t < 300.0, d.str()};
}

// --- 5: marker against the Chern number -------------------------------------

Outcome criterion_5() {
  std::ostringstream d;
  auto marker = [](const HaldaneParams& p) -> std::optional<int> {
    const Model m = build_haldane(30, 30, p);
    return half_signature(assemble(m.hamiltonian, m.lattice, Probe{central_site(m.lattice), 12.0, 0.2, 0.0})).index();
  };
  const HaldaneParams top = HaldaneParams::haldane_default();
  const int chern = oracle::chern_number({top.t, top.t_c, top.phi, top.M});
  const auto mt = marker(top);
  const auto mg = marker(HaldaneParams::massive_graphene());
  const bool ok_t = mt && *mt == marker_chern_sign * chern;
  const bool ok_g = mg && *mg == 0;
  d << "Haldane marker " << (mt ? std::to_string(*mt) : "undefined") << ", sign constant " << marker_chern_sign
    << " x Chern " << chern << "; massive graphene marker " << (mg ? std::to_string(*mg) : "undefined");
  return {ok_t && ok_g, d.str()};
}

// --- 6: local-gap laws ------------------------------------------------------

HermitianOperator random_block(Index dim, const std::vector<Index>& sites, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Triplet> upper;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    upper.emplace_back(sites[a], sites[a], Complex(scale * g(rng), 0.0));
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      upper.emplace_back(std::min(sites[a], sites[b]), std::max(sites[a], sites[b]),
                         Complex(scale * g(rng), scale * g(rng)));
    }
  }
  return HermitianOperator::from_upper(dim, upper);
}

Outcome criterion_6() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Model m = build_haldane(14, 14, HaldaneParams::haldane_default());
  const SiteLattice& lat = m.lattice;
  std::uniform_int_distribution<Index> site(0, lat.size() - 1);
  const double h2 = std::pow(linalg::norm2(m.hamiltonian.matrix()), 2);

  int mono_fail = 0;
  for (int i = 0; i < 50; ++i) {
    const Vec2 x = lat.position(site(rng)) + Vec2(u(rng) - 0.5, u(rng) - 0.5);
    const double rho = 2.0 + 10.0 * u(rng);
    const double rho_p = 1.0 + (rho - 1.0) * u(rng);
    if (lat.sites_within(x, rho_p).empty()) {
      --i;
      continue;
    }
    const double g = local_gap(m.hamiltonian, lat, x, rho).g_rho;
    const double gp = local_gap(m.hamiltonian, lat, x, rho_p).g_rho;
    // Solver tolerance is 1e-10 ||H||^2 on g^2.
    if (gp * gp < g * g - 1e-9 * h2) ++mono_fail;
  }

  int ext_fail = 0;
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = lat.position(site(rng));
    const double rho = 2.0 + 6.0 * u(rng);
    std::vector<Index> outside;
    for (Index s : lat.sites_within(lat.position(site(rng)), 4.0)) {
      if ((lat.position(s) - x).norm() >= rho) outside.push_back(s);
    }
    if (outside.empty()) {
      --i;
      continue;
    }
    const HermitianOperator w = random_block(lat.size(), outside, 1.0 + 3.0 * u(rng), rng);
    if (local_gap(m.hamiltonian, lat, x, rho).g_rho != local_gap(m.hamiltonian + w, lat, x, rho).g_rho) ++ext_fail;
  }

  int weyl_fail = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const HaldaneParams p{1.0, u(rng), 2.0 * std::numbers::pi * u(rng), 2.0 * u(rng) - 1.0};
    const Model small = build_haldane(10, 10, p);  // dimension 200
    const SiteLattice& sl = small.lattice;
    std::uniform_int_distribution<Index> ss(0, sl.size() - 1);
    const Vec2 x = sl.position(ss(rng));
    const Vec2 y = sl.position(ss(rng));
    const double rho = 1.5 + 5.0 * u(rng);
    if (distance_to_region(y, x, rho) <= 0.0) {
      --i;
      continue;
    }
    const HermitianOperator w = random_block(sl.size(), sl.sites_within(y, 1.0 + 2.0 * u(rng)), 0.5 * u(rng), rng);
    const double lhs = local_gap(small.hamiltonian + w, sl, x, rho).g_rho;
    const double rhs = local_gap(small.hamiltonian, sl, x, rho).g_rho - weyl_bound_rhs(small.hamiltonian, w, sl, x, rho, y);
    worst = std::max(worst, rhs - lhs);
    if (lhs < rhs - 1e-9) ++weyl_fail;
  }

  std::ostringstream d;
  d << "monotonicity failures " << mono_fail << "/50; exterior invariance failures " << ext_fail
    << "/20; Weyl-type failures " << weyl_fail << "/100 (largest rhs - lhs " << num(worst, 3) << ")";
  return {mono_fail == 0 && ext_fail == 0 && weyl_fail == 0, d.str()};
}

// --- 7: bulk-gap convergence ------------------------------------------------

Outcome criterion_7() {
  const HaldaneParams p = HaldaneParams::haldane_default();
  const Model m = build_haldane(30, 30, p);
  const double g = local_gap(m.hamiltonian, m.lattice, central_site(m.lattice), 12.0).g_rho;
  const double bulk = oracle::bulk_gap({p.t, p.t_c, p.phi, p.M});
  const double rel = std::abs(g - bulk) / bulk;
  std::ostringstream d;
  d << "g_12 = " << num(g, 5) << ", Bloch bulk gap " << num(bulk, 5) << ", relative deviation "
    << num(100.0 * rel, 3) << "% (limit 5%)";
  return {rel <= 0.05, d.str()};
}

// --- 8: spectral flow -------------------------------------------------------

Outcome criterion_8() {
  const auto t0 = Clock::now();
  const Model m = build_heterostructure(40, 40, HaldaneParams::massive_graphene(), HaldaneParams::haldane_default());
  const SiteLattice& lat = m.lattice;
  const double yc = lat.center().y();
  const Vec2 x0(lat.lower_corner().x() + 11.5, yc), x1(lat.upper_corner().x() - 11.5, yc);
  const Probe probe{x0, 12.0, 0.2, 0.0};
  const ProbePath path = ProbePath::through(lat, {x0, x1}, probe.rho, 21);
  const DisorderSpec disk{6.0, 2024, lat.center(), 10.0};
  const HermitianOperator w = apply_disorder(m.hamiltonian, lat, disk) - m.hamiltonian;
  const FlowStabilityReport rep = flow_stability_check(m.hamiltonian, w, lat, probe, path);
  const double t = seconds_since(t0);

  const bool ok = std::abs(rep.clean.flow) == 1 && rep.stable && rep.clean.method_agreement &&
                  rep.perturbed.method_agreement && t < 600.0;
  std::ostringstream d;
  d << "flow clean " << rep.clean.flow << " (crossings " << rep.clean.crossing_flow << "), disordered "
    << rep.perturbed.flow << " (crossings " << rep.perturbed.crossing_flow << "); methods agree "
    << (rep.clean.method_agreement && rep.perturbed.method_agreement ? "yes" : "no") << "; runtime " << num(t, 3)
    << " s (limit 600)";
  return {ok, d.str()};
}

// --- 9: perturbation coefficients -------------------------------------------

Outcome criterion_9() {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  int fails = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const DenseMatrix l = oracle::random_hermitian(12, rng);
    const DenseMatrix v = oracle::random_hermitian(12, rng);
    const DenseMatrix w = oracle::random_hermitian(12, rng);
    const PerturbationCoefficients pc = perturbation_coefficients(l, v, w);
    const oracle::FdCoefficients fd = oracle::finite_difference(l, v, w);
    for (auto [a, b] : {std::pair{pc.mu10, fd.mu10}, {pc.mu01, fd.mu01}, {pc.mu11, fd.mu11}}) {
      const double rel = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
      worst = std::max(worst, rel);
      if (rel > 1e-6) ++fails;
    }
  }
  return {fails == 0, "25 instances, largest relative deviation " + num(worst, 3) + " (limit 1e-6)"};
}

// --- 10: kernel locality ----------------------------------------------------

Outcome criterion_10() {
  const Model m = build_haldane(20, 20, HaldaneParams::haldane_default());
  const SiteLattice& lat = m.lattice;
  const std::vector<Probe> probes{{central_site(lat), 6.0, 0.2, 0.0},
                                  {lat.center() + Vec2(3.3, -2.1), 8.0, 0.05, 0.0},
                                  {lat.lower_corner() + Vec2(4.0, 4.0), 10.0, 0.5, 0.3},
                                  {lat.center(), 12.0, 1.0, -0.2},
                                  {lat.center(), 100.0, 0.1, 0.0}};
  double worst = -std::numeric_limits<double>::infinity();
  Index pairs = 0;
  for (const Probe& p : probes) {
    const LocalizerMatrix lm = assemble(m.hamiltonian, lat, p);
    const double h = linalg::norm2(restrict(m.hamiltonian.shifted(p.energy).matrix(), lm.sites));
    const auto ed = linalg::eigh(DenseMatrix(lm.matrix));
    for (Index i = 0; i < ed.values.size(); ++i) {
      worst = std::max(worst, kernel_locality_check(lm, ed.values(i), ed.vectors.col(i), h));
      ++pairs;
    }
  }
  return {worst <= 1e-9, std::to_string(pairs) + " eigenpairs, largest residual " + num(worst, 3) + " (limit 1e-9)"};
}

// --- 11: Anderson ensemble --------------------------------------------------

Outcome criterion_11() {
  const auto t0 = Clock::now();
  EnsembleSpec s;
  s.nx = 30;
  s.ny = 30;
  s.lambda_list = {0.0, 1.5, 2.5, 4.0};
  s.n_realizations = 20;
  for (std::uint64_t i = 1; i <= 20; ++i) s.seeds.push_back(i);
  s.probe.kappa = 0.2;
  s.rho_grid = {10.0};
  const EnsembleStats st = run_ensemble(s);
  const double t = seconds_since(t0);

  std::map<double, const EnsembleAggregate*> by_lambda;
  for (const auto& a : st.aggregates) by_lambda[a.lambda] = &a;
  const EnsembleAggregate& clean = *by_lambda.at(0.0);
  const bool zero_var = clean.g_rho.std == 0.0 && clean.mu.std == 0.0 && clean.index.std == 0.0;
  bool index_ok = clean.n_defined > 0;
  std::ostringstream d;
  for (double l : {0.0, 1.5, 2.5}) {
    const EnsembleAggregate& a = *by_lambda.at(l);
    index_ok = index_ok && a.n_defined > 0 && a.index.mean == clean.index.mean &&
               a.modal_index == clean.modal_index && a.agreement >= 0.95;
    d << "lambda=" << l << ": mean index " << num(a.index.mean) << ", agreement " << num(a.agreement, 3)
      << ", mean mu " << num(a.mu.mean) << "; ";
  }
  const double mu15 = by_lambda.at(1.5)->mu.mean, mu4 = by_lambda.at(4.0)->mu.mean;
  d << "lambda=4: mean mu " << num(mu4) << "; zero variance at lambda=0 " << (zero_var ? "yes" : "no")
    << "; runtime " << num(t, 4) << " s (limit 1200)";
  return {zero_var && index_ok && mu4 < mu15 && t < 1200.0, d.str()};
}

// --- 12: determinism --------------------------------------------------------

Outcome criterion_12() {
  const std::filesystem::path fixtures = SLOC_FIXTURE_DIR;
  std::ostringstream d;
  bool ok = true;
  for (const char* name : {"anderson_small.json", "flow_small.json"}) {
    const auto cfg = cli::Config::load((fixtures / "configs" / name).string());
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 2}) {
      cli::RunContext ctx;
      ctx.out_dir = testing::scratch_dir("determinism");
      ctx.threads = threads;
      const cli::CommandResult res = cli::run_command(cfg, ctx);
      std::map<std::string, std::string> csv;
      for (const std::string& f : res.outputs) {
        if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") csv[f] = testing::read_file(ctx.out_dir / f);
      }
      runs.push_back(std::move(csv));
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    d << cfg.command() << ": " << runs[0].size() << " CSV files " << (same ? "identical" : "differ") << "; ";
  }
  return {ok, d.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> c{
      {"tapering constants", criterion_1},
      {"minimum at k=1", criterion_2},
      {"direct estimator limits", criterion_3},
      {"localizer gap bound over admissible pairs", criterion_4},
      {"marker equals signed Chern number", criterion_5},
      {"local-gap laws", criterion_6},
      {"bulk-gap convergence", criterion_7},
      {"spectral flow", criterion_8},
      {"perturbation coefficients", criterion_9},
      {"kernel locality", criterion_10},
      {"Anderson ensemble", criterion_11},
      {"determinism", criterion_12},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sloc acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only != 0 && only != n) continue;
    const auto& [name, fn] = criteria()[i];
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::printf("criterion %2d: %s  %s  [%s] (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
