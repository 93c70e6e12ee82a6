#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <sloc/flow.hpp>
#include <sloc/linalg.hpp>
#include <sloc/localgap.hpp>
#include <sloc/parallel.hpp>
#include <sloc/rng.hpp>
#include <sloc/tapering.hpp>
#include <sloc/version.hpp>

#include "output.hpp"

namespace sloc::cli {

namespace {

std::string prefix(const Config& cfg) { return cfg.string("/output/prefix", ""); }

std::string emit(const Config& cfg, const RunContext& ctx, const std::string& name, const std::string& content) {
  const std::string file = prefix(cfg) + name;
  write_atomic(ctx.out_dir / file, content);
  return file;
}

// Library argument errors raised while building from a block point at that block.
template <class Fn>
auto guarded(const Config& cfg, const std::string& ptr, Fn&& fn) {
  try {
    return fn();
  } catch (const sloc::InvalidArgument& e) {
    cfg.fail(ptr, e.what());
  }
}

HaldaneParams side(const Config& cfg, const std::string& base, const HaldaneParams& fallback) {
  HaldaneParams p;
  p.t = cfg.number(base + "/t", fallback.t);
  p.t_c = cfg.number(base + "/t_c_t", fallback.t_c);
  p.phi = cfg.number(base + "/phi_rad", fallback.phi);
  p.M = cfg.number(base + "/M_t", fallback.M);
  return p;
}

std::vector<double> positive_list(const Config& cfg, const std::string& ptr) {
  auto v = cfg.numbers(ptr);
  for (double x : v) {
    if (!(x > 0.0)) cfg.fail(ptr, "values must be positive");
  }
  return v;
}

double positive(const Config& cfg, const std::string& ptr, std::optional<double> fallback = std::nullopt) {
  const double v = fallback && !cfg.has(ptr) ? *fallback : cfg.number(ptr);
  if (!(v > 0.0)) cfg.fail(ptr, "must be positive");
  return v;
}

double kappa(const Config& cfg) { return positive(cfg, "/localizer/kappa_t_per_al"); }
double energy(const Config& cfg) { return cfg.number("/localizer/energy_t", 0.0); }

RegionShape shape(const Config& cfg) {
  const std::string s = cfg.string("/probe/shape", "ball");
  if (s == "ball") return RegionShape::Ball;
  if (s == "box") return RegionShape::Box;
  cfg.fail("/probe/shape", "expected 'ball' or 'box'");
}

HermitianOperator with_disorder(const Config& cfg, const RunContext& ctx, const Model& m) {
  const auto d = disorder_spec(cfg, ctx);
  if (!d) return m.hamiltonian;
  return guarded(cfg, "/disorder", [&] { return apply_disorder(m.hamiltonian, m.lattice, *d); });
}

// Evenly spaced points along a polyline, including both ends.
std::vector<Vec2> sample_polyline(const std::vector<Vec2>& pts, int samples) {
  ProbePath p;
  p.waypoints = pts;
  std::vector<Vec2> out;
  for (int i = 0; i < samples; ++i) out.push_back(p.at(samples == 1 ? 0.0 : double(i) / (samples - 1)));
  return out;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

Model build_model(const Config& cfg) {
  const std::string kind = cfg.string("/lattice/kind", "haldane");
  return guarded(cfg, "/lattice", [&]() -> Model {
    if (kind == "haldane") {
      const std::string b = cfg.string("/lattice/boundary", "open");
      if (b != "open" && b != "periodic") cfg.fail("/lattice/boundary", "expected 'open' or 'periodic'");
      return build_haldane(cfg.integer("/lattice/nx"), cfg.integer("/lattice/ny"),
                           side(cfg, "/lattice", HaldaneParams::haldane_default()),
                           b == "open" ? Boundary::Open : Boundary::Periodic);
    }
    if (kind == "heterostructure") {
      if (!cfg.has("/lattice/right")) cfg.fail("/lattice/right", "heterostructure needs a 'right' parameter block");
      return build_heterostructure(cfg.integer("/lattice/nx"), cfg.integer("/lattice/ny"),
                                   side(cfg, "/lattice", HaldaneParams::haldane_default()),
                                   side(cfg, "/lattice/right", HaldaneParams::massive_graphene()));
    }
    if (kind == "ssh") {
      return build_ssh(cfg.integer("/lattice/n_cells"), cfg.number("/lattice/t1_t", 1.0), cfg.number("/lattice/t2_t"));
    }
    cfg.fail("/lattice/kind", "expected 'haldane', 'heterostructure' or 'ssh'");
  });
}

Vec2 probe_center(const Config& cfg, const SiteLattice& lat) {
  return cfg.has("/probe/x_al") ? cfg.vec2("/probe/x_al") : lat.center();
}

BoundParams bound_params(const Config& cfg) {
  return guarded(cfg, "/localizer", [&] {
    return BoundParams::from_ab(cfg.number("/localizer/a", 0.15), cfg.number("/localizer/b", 0.5),
                                cfg.number("/localizer/C_F", 2.0));
  });
}

std::optional<DisorderSpec> disorder_spec(const Config& cfg, const RunContext& ctx) {
  if (!cfg.has("/disorder")) return std::nullopt;
  DisorderSpec d;
  d.lambda = cfg.number("/disorder/lambda_t");
  d.seed = ctx.seed_override.value_or(cfg.has("/disorder/seed") ? cfg.uint64("/disorder/seed") : 0);
  if (cfg.has("/disorder/disk_center_al")) {
    d.disk_center = cfg.vec2("/disorder/disk_center_al");
    d.disk_radius = positive(cfg, "/disorder/disk_radius_al");
  }
  guarded(cfg, "/disorder", [&] {
    d.validate();
    return 0;
  });
  return d;
}

EnsembleSpec ensemble_spec(const Config& cfg, const RunContext& ctx) {
  if (cfg.string("/lattice/kind", "haldane") != "haldane") cfg.fail("/lattice/kind", "anderson needs a haldane lattice");
  EnsembleSpec s;
  s.nx = cfg.integer("/lattice/nx");
  s.ny = cfg.integer("/lattice/ny");
  s.params = side(cfg, "/lattice", HaldaneParams::haldane_default());
  s.lambda_list = cfg.numbers("/sweep/lambda_t");
  if (cfg.has("/sweep/seeds")) {
    s.seeds = cfg.uint64s("/sweep/seeds");
    s.n_realizations = cfg.integer("/sweep/n_realizations", static_cast<int>(s.seeds.size()));
  } else {
    s.n_realizations = cfg.integer("/sweep/n_realizations");
    for (int i = 0; i < s.n_realizations; ++i) s.seeds.push_back(static_cast<std::uint64_t>(i + 1));
  }
  if (ctx.seed_override) {
    for (std::size_t i = 0; i < s.seeds.size(); ++i) s.seeds[i] = *ctx.seed_override + i;
  }
  s.probe.kappa = kappa(cfg);
  s.probe.energy = energy(cfg);
  s.probe.shape = shape(cfg);
  if (cfg.has("/probe/x_al")) s.center = cfg.vec2("/probe/x_al");
  s.rho_grid = cfg.has("/sweep/rho_al") ? positive_list(cfg, "/sweep/rho_al")
                                         : std::vector<double>{positive(cfg, "/probe/rho_al")};
  s.dos_sigma = positive(cfg, "/sweep/dos_sigma_t", default_dos_sigma);
  guarded(cfg, "/sweep", [&] {
    s.validate();
    return 0;
  });
  return s;
}

nlohmann::json to_json(const EnsembleSpec& s) {
  nlohmann::json j;
  j["nx"] = s.nx;
  j["ny"] = s.ny;
  j["params"] = {{"t", s.params.t}, {"t_c", s.params.t_c}, {"phi", s.params.phi}, {"M", s.params.M}};
  j["lambda_list"] = s.lambda_list;
  j["n_realizations"] = s.n_realizations;
  j["seeds"] = s.seeds;
  j["probe"] = {{"kappa", s.probe.kappa},
                {"energy", s.probe.energy},
                {"shape", s.probe.shape == RegionShape::Ball ? "ball" : "box"}};
  if (s.center) j["center"] = {s.center->x(), s.center->y()};
  j["rho_grid"] = s.rho_grid;
  j["dos_sigma"] = s.dos_sigma;
  return j;
}

EnsembleSpec ensemble_spec_from_json(const nlohmann::json& j) {
  EnsembleSpec s;
  s.nx = j.at("nx").get<int>();
  s.ny = j.at("ny").get<int>();
  const auto& p = j.at("params");
  s.params = {p.at("t").get<double>(), p.at("t_c").get<double>(), p.at("phi").get<double>(), p.at("M").get<double>()};
  s.lambda_list = j.at("lambda_list").get<std::vector<double>>();
  s.n_realizations = j.at("n_realizations").get<int>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.probe.kappa = j.at("probe").at("kappa").get<double>();
  s.probe.energy = j.at("probe").at("energy").get<double>();
  s.probe.shape = j.at("probe").at("shape").get<std::string>() == "box" ? RegionShape::Box : RegionShape::Ball;
  if (j.contains("center")) s.center = Vec2(j["center"][0].get<double>(), j["center"][1].get<double>());
  s.rho_grid = j.at("rho_grid").get<std::vector<double>>();
  s.dos_sigma = j.at("dos_sigma").get<double>();
  return s;
}

// --- commands --------------------------------------------------------------

CommandResult cmd_local_gap(const Config& cfg, const RunContext& ctx) {
  const bool any = cfg.has("/sweep/rho_al") || cfg.has("/sweep/path_al") || cfg.has("/sweep/dos_energies_t");
  if (!any) cfg.fail("/sweep", "local-gap needs at least one of rho_al, path_al or dos_energies_t");
  const Model m = build_model(cfg);
  const HermitianOperator h = with_disorder(cfg, ctx, m);
  const Vec2 x = probe_center(cfg, m.lattice);
  const double e = energy(cfg);
  const RegionShape sh = shape(cfg);
  CommandResult res;

  if (cfg.has("/sweep/rho_al")) {
    const auto rhos = positive_list(cfg, "/sweep/rho_al");
    std::vector<LocalGapResult> rows(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) rows[i] = local_gap(h, m.lattice, x, rhos[i], e, sh);
    CsvTable t({"rho_al", "g_rho", "kept_sites"});
    t.comment("x_al=" + fmt(x.x()) + " " + fmt(x.y()) + " energy_t=" + fmt(e));
    for (const auto& r : rows) t.add({fmt(r.rho), fmt(r.g_rho), std::to_string(r.kept_sites)});
    res.outputs.push_back(emit(cfg, ctx, "rho_sweep.csv", t.str()));
  }
  if (cfg.has("/sweep/path_al")) {
    const auto pts = sample_polyline(cfg.vec2s("/sweep/path_al"), cfg.integer("/sweep/samples", 41));
    const double rho = positive(cfg, "/probe/rho_al");
    const auto prof = local_gap_profile(h, m.lattice, pts, rho, e, ctx.threads);
    CsvTable t({"x_al", "y_al", "g_rho"});
    t.comment("rho_al=" + fmt(rho) + " energy_t=" + fmt(e));
    for (const auto& r : prof) t.add({fmt(r.x.x()), fmt(r.x.y()), fmt(r.g_rho)});
    res.outputs.push_back(emit(cfg, ctx, "profile.csv", t.str()));
  }
  if (cfg.has("/sweep/dos_energies_t")) {
    const auto es = cfg.numbers("/sweep/dos_energies_t");
    const double sigma = positive(cfg, "/sweep/dos_sigma_t", default_dos_sigma);
    const RealVector ev = linalg::eigvalsh(h.dense());
    CsvTable t({"energy_t", "dos"});
    t.comment("sigma_t=" + fmt(sigma));
    for (double en : es) t.add({fmt(en), fmt(dos_window(ev, h.dim(), en, sigma))});
    res.outputs.push_back(emit(cfg, ctx, "dos.csv", t.str()));
  }
  return res;
}

CommandResult cmd_kappa_bounds(const Config& cfg, const RunContext& ctx) {
  const Model m = build_model(cfg);
  const HermitianOperator h = with_disorder(cfg, ctx, m);
  const Vec2 x = probe_center(cfg, m.lattice);
  const double rho = positive(cfg, "/probe/rho_al");
  const double k = kappa(cfg);
  const double e = energy(cfg);
  const BoundParams bp = bound_params(cfg);
  const BoundParams bp0 = guarded(cfg, "/localizer", [&] { return BoundParams::from_ab(0.0, bp.b, bp.C_F); });
  const auto defects = sample_polyline(cfg.vec2s("/sweep/defect_path_al"), cfg.integer("/sweep/defect_samples", 11));
  const double strength = cfg.number("/sweep/defect_strength_t", 7.0);

  CsvTable t({"defect_x_al", "defect_y_al", "g_rho", "lower", "upper_cond10", "upper_cond10_a0", "upper_cond11",
              "upper_cond12", "upper_defect"});
  t.comment("x_al=" + fmt(x.x()) + " " + fmt(x.y()) + " rho_al=" + fmt(rho) + " kappa_t_per_al=" + fmt(k) +
            " a=" + fmt(bp.a) + " b=" + fmt(bp.b) + " C_F=" + fmt(bp.C_F));
  const DiracOperator d(m.lattice, x);
  for (const Vec2& y : defects) {
    RealVector w = RealVector::Zero(m.lattice.size());
    w(m.lattice.nearest_site(y)) = strength;
    const HermitianOperator W = HermitianOperator::diagonal(w);
    const HermitianOperator hw = strength == 0.0 ? h : h + W;
    const HermitianOperator hs = hw.shifted(e);
    const double g = local_gap(hw, m.lattice, x, rho, e).g_rho;
    const KappaWindow w10 = kappa_window_cond10(hs, d, g, rho, bp, k);
    const KappaWindow w10a0 = kappa_window_cond10(hs, d, g, rho, bp0, k);
    const KappaWindow w11 = kappa_window_global(hs, d, g, rho, bp.b, bp.C_F);
    const KappaWindow w12 = kappa_window_cond12(hs, d, g, rho, bp);
    const KappaWindow wd = defect_bound(h, W, m.lattice, x, y, rho, bp.C_F, e);
    t.add({fmt(y.x()), fmt(y.y()), fmt(g), fmt(w10.lower), fmt(w10.upper), fmt(w10a0.upper), fmt(w11.upper),
           fmt(w12.upper), fmt(wd.upper)});
  }
  CommandResult res;
  res.outputs.push_back(emit(cfg, ctx, "kappa_bounds.csv", t.str()));
  return res;
}

CommandResult cmd_localizer(const Config& cfg, const RunContext& ctx) {
  const Model m = build_model(cfg);
  const HermitianOperator h = with_disorder(cfg, ctx, m);
  const Vec2 x = probe_center(cfg, m.lattice);
  const auto kappas = cfg.has("/sweep/kappa_t_per_al") ? positive_list(cfg, "/sweep/kappa_t_per_al")
                                                        : std::vector<double>{kappa(cfg)};
  const auto rhos = cfg.has("/sweep/rho_al") ? positive_list(cfg, "/sweep/rho_al")
                                              : std::vector<double>{positive(cfg, "/probe/rho_al")};
  const double e = energy(cfg);
  const RegionShape sh = shape(cfg);
  const std::optional<double> tol = cfg.opt_number("/localizer/zero_tol");

  struct Row {
    double kappa, rho, g;
    IndexResult ir;
  };
  std::vector<double> gaps(rhos.size());
  for (std::size_t r = 0; r < rhos.size(); ++r) gaps[r] = local_gap(h, m.lattice, x, rhos[r], e, sh).g_rho;
  std::vector<Row> rows(kappas.size() * rhos.size());
  parallel_for(rows.size(), ctx.threads, [&](std::size_t i) {
    const double kk = kappas[i / rhos.size()], rr = rhos[i % rhos.size()];
    const Probe p{x, rr, kk, e, sh};
    rows[i] = {kk, rr, gaps[i % rhos.size()], half_signature(assemble(h, m.lattice, p), tol)};
  });

  CsvTable t({"kappa_t_per_al", "rho_al", "g_rho", "mu", "n_plus", "n_minus", "half_signature", "gap_closed", "ratio"});
  t.comment("x_al=" + fmt(x.x()) + " " + fmt(x.y()) + " energy_t=" + fmt(e));
  nlohmann::json js = nlohmann::json::array();
  for (const Row& r : rows) {
    const double ratio = r.ir.mu > 0.0 ? r.g / r.ir.mu : INFINITY;
    t.add({fmt(r.kappa), fmt(r.rho), fmt(r.g), fmt(r.ir.mu), std::to_string(r.ir.n_plus), std::to_string(r.ir.n_minus),
           fmt(r.ir.half_signature()), r.ir.gap_closed ? "1" : "0", fmt(ratio)});
    js.push_back({{"kappa_t_per_al", r.kappa}, {"rho_al", r.rho}, {"g_rho", r.g}, {"mu", r.ir.mu},
                  {"half_signature", r.ir.half_signature()}, {"gap_closed", r.ir.gap_closed}});
  }
  CommandResult res;
  res.outputs.push_back(emit(cfg, ctx, "localizer.csv", t.str()));
  if (cfg.boolean("/output/json", true)) res.outputs.push_back(emit(cfg, ctx, "localizer.json", js.dump(2) + "\n"));
  res.summary = {{"rows", rows.size()}};
  return res;
}

namespace {

std::string spectrum_csv(const ProbePath& path, const FlowResult& r, int tracked) {
  std::vector<std::string> header = {"t", "x_al", "y_al"};
  for (int i = 1; i <= tracked; ++i) header.push_back("eig_" + std::to_string(i));
  CsvTable t(header);
  t.comment("flow=" + std::to_string(r.flow) + " crossing_flow=" + std::to_string(r.crossing_flow));
  for (const auto& s : r.spectrum) {
    const Vec2 p = path.at(s.t);
    std::vector<std::string> row = {fmt(s.t), fmt(p.x()), fmt(p.y())};
    for (int i = 0; i < tracked; ++i) row.push_back(i < s.eigenvalues.size() ? fmt(s.eigenvalues(i)) : "nan");
    t.add(row);
  }
  return t.str();
}

nlohmann::json flow_json(const FlowResult& r) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& x : r.crossings) c.push_back({{"t", x.t}, {"direction", x.direction}});
  return {{"flow", r.flow},
          {"crossing_flow", r.crossing_flow},
          {"tracking_converged", r.tracking_converged},
          {"method_agreement", r.method_agreement},
          {"start_signature", r.endpoints[0].signature()},
          {"end_signature", r.endpoints[1].signature()},
          {"start_mu", r.endpoints[0].mu},
          {"end_mu", r.endpoints[1].mu},
          {"crossings", c}};
}

}  // namespace

CommandResult cmd_flow(const Config& cfg, const RunContext& ctx) {
  const Model m = build_model(cfg);
  const double rho = positive(cfg, "/probe/rho_al");
  Probe probe{Vec2::Zero(), rho, kappa(cfg), energy(cfg), shape(cfg)};
  const auto waypoints = cfg.vec2s("/sweep/path_al");
  const int samples = cfg.integer("/sweep/samples", 41);
  if (samples < 2) cfg.fail("/sweep/samples", "need at least 2 samples");
  FlowOptions opts;
  opts.tracked = cfg.integer("/sweep/tracked", 8);
  if (opts.tracked < 1) cfg.fail("/sweep/tracked", "must be positive");
  opts.zero_tol = cfg.opt_number("/localizer/zero_tol");
  const ProbePath path = ProbePath::through(m.lattice, waypoints, rho, samples);
  probe.x = path.at(0.0);

  CommandResult res;
  const auto dis = disorder_spec(cfg, ctx);
  nlohmann::json summary;
  if (!dis || dis->lambda == 0.0) {
    const FlowResult r = spectral_flow(m.hamiltonian, m.lattice, probe, path, opts);
    res.outputs.push_back(emit(cfg, ctx, "flow_spectrum.csv", spectrum_csv(path, r, opts.tracked)));
    summary["clean"] = flow_json(r);
  } else {
    const HermitianOperator w = apply_disorder(m.hamiltonian, m.lattice, *dis) - m.hamiltonian;
    const FlowStabilityReport rep = flow_stability_check(m.hamiltonian, w, m.lattice, probe, path, opts);
    res.outputs.push_back(emit(cfg, ctx, "flow_spectrum.csv", spectrum_csv(path, rep.clean, opts.tracked)));
    res.outputs.push_back(emit(cfg, ctx, "flow_spectrum_disordered.csv", spectrum_csv(path, rep.perturbed, opts.tracked)));
    summary["clean"] = flow_json(rep.clean);
    summary["disordered"] = flow_json(rep.perturbed);
    summary["stable"] = rep.stable;
    summary["disorder"] = {{"lambda_t", dis->lambda}, {"seed", dis->seed}};
  }
  summary["lambda_sites"] = path.lambda.size();
  if (cfg.boolean("/output/json", true)) res.outputs.push_back(emit(cfg, ctx, "flow.json", summary.dump(2) + "\n"));
  res.summary = summary;
  return res;
}

CommandResult cmd_anderson(const Config& cfg, const RunContext& ctx) {
  const EnsembleSpec spec = ensemble_spec(cfg, ctx);
  const double C_F = cfg.number("/localizer/C_F", 2.0);
  const EnsembleStats st = run_ensemble(spec, ctx.threads);

  // Clean-system norms for the rho_c heuristic.
  const Model clean = build_haldane(spec.nx, spec.ny, spec.params, Boundary::Open);
  const Vec2 x = spec.center.value_or(clean.lattice.center());
  const double h_norm = linalg::norm2(clean.hamiltonian.shifted(spec.probe.energy).matrix());
  const double c_norm = linalg::norm2(commutator_with_dirac(clean.hamiltonian, DiracOperator(clean.lattice, x)));

  CsvTable rows({"lambda", "seed", "rho", "g_rho", "mu", "index", "ratio", "dos0", "status"});
  rows.comment("seeds: " + join(spec.seeds));
  rows.comment("kappa_t_per_al=" + fmt(spec.probe.kappa) + " lattice=" + std::to_string(spec.nx) + "x" + std::to_string(spec.ny));
  for (const auto& r : st.rows) {
    rows.add({fmt(r.lambda), std::to_string(r.seed), fmt(r.rho), fmt(r.g_rho), fmt(r.mu),
              r.index ? std::to_string(*r.index) : "nan", fmt(r.ratio), fmt(r.dos0),
              r.failed ? "failed" : (r.index ? "ok" : "undefined")});
  }
  CsvTable agg({"lambda", "rho", "mean_g_rho", "std_g_rho", "mean_mu", "std_mu", "mean_index", "std_index",
                "mean_ratio", "std_ratio", "mean_dos0", "std_dos0", "n_defined", "n_undefined", "modal_index",
                "agreement", "ratio_le_2", "expected_gap", "rho_c"});
  agg.comment("seeds: " + join(spec.seeds));
  for (const auto& a : st.aggregates) {
    const double eg = a.dos0.mean > 0.0 ? expected_gap_estimate(a.rho, a.dos0.mean, 2) : INFINITY;
    const double rc = rho_c_estimate(h_norm, c_norm, std::max(a.dos0.mean, 0.0), C_F, 2);
    agg.add({fmt(a.lambda), fmt(a.rho), fmt(a.g_rho.mean), fmt(a.g_rho.std), fmt(a.mu.mean), fmt(a.mu.std),
             fmt(a.index.mean), fmt(a.index.std), fmt(a.ratio.mean), fmt(a.ratio.std), fmt(a.dos0.mean),
             fmt(a.dos0.std), std::to_string(a.n_defined), std::to_string(a.n_undefined),
             std::to_string(a.modal_index), fmt(a.agreement), a.ratio.mean <= 2.0 ? "1" : "0", fmt(eg), fmt(rc)});
  }
  CommandResult res;
  res.outputs.push_back(emit(cfg, ctx, "ensemble.csv", rows.str()));
  res.outputs.push_back(emit(cfg, ctx, "ensemble_summary.csv", agg.str()));
  res.outputs.push_back(emit(cfg, ctx, "ensemble_spec.json", to_json(spec).dump(2) + "\n"));
  res.summary = {{"realizations", st.rows.size()}};
  return res;
}

CommandResult cmd_tapering(const Config& cfg, const RunContext& ctx) {
  const TaperFamily family = guarded(cfg, "/sweep/family", [&] {
    return parse_taper_family(cfg.string("/sweep/family", "beta"));
  });
  const auto ks = cfg.numbers("/sweep/k");
  for (double k : ks) {
    if (!(k >= 0.0)) cfg.fail("/sweep/k", "k must be >= 0");
  }
  CommandResult res;
  CsvTable table({"family", "k", "cf", "truncated", "tail", "decay_exponent", "p_max", "status"});
  // Steep exp profiles need very long Fourier tails; the table can be skipped.
  for (double k : cfg.boolean("/sweep/fourier_table", true) ? ks : std::vector<double>{}) {
    const TaperingProfile f(family, k);
    try {
      const auto r = cf_fourier_detailed(f);
      table.add({to_string(family), fmt(k), fmt(r.value), fmt(r.truncated), fmt(r.tail), fmt(r.decay_exponent),
                 fmt(r.p_max), "ok"});
    } catch (const ConvergenceError& e) {
      const bool diverges = std::string(e.what()).find("diverges") != std::string::npos;
      table.add({to_string(family), fmt(k), "inf", "nan", "nan", fmt(e.residual()), "nan",
                 diverges ? "diverges" : "unconverged"});
    }
  }
  if (table.rows() > 0) res.outputs.push_back(emit(cfg, ctx, "cf_table.csv", table.str()));

  if (cfg.has("/lattice")) {
    const Model m = build_model(cfg);
    const Vec2 x = probe_center(cfg, m.lattice);
    const auto rhos = positive_list(cfg, "/sweep/rho_al");
    const std::optional<double> delta = cfg.opt_number("/sweep/delta_al");
    const auto rows = guarded(cfg, "/sweep", [&] {
      return cf_sweep(m.hamiltonian, m.lattice, x, rhos, family, ks, delta, ctx.threads);
    });
    CsvTable t({"family", "k", "rho_al", "cf"});
    for (const auto& r : rows) t.add({to_string(family), fmt(r.k), fmt(r.rho), fmt(r.cf)});
    res.outputs.push_back(emit(cfg, ctx, "cf_direct.csv", t.str()));
  }
  return res;
}

CommandResult run_command(const Config& cfg, const RunContext& ctx) {
  validate_schema(cfg);
  const std::string c = cfg.command();
  if (c == "local-gap") return cmd_local_gap(cfg, ctx);
  if (c == "kappa-bounds") return cmd_kappa_bounds(cfg, ctx);
  if (c == "localizer") return cmd_localizer(cfg, ctx);
  if (c == "flow") return cmd_flow(cfg, ctx);
  if (c == "anderson") return cmd_anderson(cfg, ctx);
  return cmd_tapering(cfg, ctx);
}

std::string write_manifest(const Config& cfg, const RunContext& ctx, const CommandResult& res, double runtime_s) {
  nlohmann::json j;
  j["command"] = cfg.command();
  j["config"] = cfg.source();
  j["config_fnv1a64"] = fnv1a_hex(cfg.text());
  j["config_schema_version"] = config_schema_version;
  j["sloc_version"] = sloc::version;
  j["lattice_schema_version"] = lattice_schema_version;
  j["rng"] = Philox4x32::name;
  j["threads"] = ctx.threads;
  if (ctx.seed_override) j["seed_override"] = *ctx.seed_override;
  j["runtime_s"] = runtime_s;
  j["outputs"] = res.outputs;
  j["summary"] = res.summary;
  return emit(cfg, ctx, "manifest.json", j.dump(2) + "\n");
}

std::string write_plot_script(const Config& cfg, const RunContext& ctx, const CommandResult& res) {
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "# Plots every CSV column against the first one.\n"
     << "import sys\n"
     << "import matplotlib.pyplot as plt\n"
     << "import pandas as pd\n\n"
     << "files = [\n";
  for (const auto& f : res.outputs) {
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") py << "    \"" << f << "\",\n";
  }
  py << "]\n\n"
     << "for name in files:\n"
     << "    df = pd.read_csv(name, comment=\"#\")\n"
     << "    x = df.columns[0]\n"
     << "    ax = df.plot(x=x, y=[c for c in df.columns[1:] if df[c].dtype.kind in \"fi\"], marker=\".\")\n"
     << "    ax.set_title(name)\n"
     << "    ax.figure.savefig(name.replace(\".csv\", \".png\"), dpi=150)\n"
     << "if \"--show\" in sys.argv:\n"
     << "    plt.show()\n";
  return emit(cfg, ctx, "plot.py", py.str());
}

}  // namespace sloc::cli
