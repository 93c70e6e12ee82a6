#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include <sloc/types.hpp>
#include <sloc/version.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace sloc::cli;
  CLI::App app{"Spectral localizer toolkit"};
  app.set_version_flag("--version", std::string(sloc::version));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed_override = 0;
  bool emit_plot = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed_override, "Replace config seeds (ensembles use seed+i)");
    sub->add_flag("--emit-plot-script", emit_plot, "Also write a plotting script for the CSVs");
  };
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"local-gap", "Local gap sweeps: rho sweep, profile along a path, window DOS"},
      {"kappa-bounds", "Admissible kappa window as a defect moves across the lattice"},
      {"localizer", "Localizer gap and index over kappa and rho grids"},
      {"flow", "Spectral flow of the localizer along a probe path"},
      {"anderson", "Disorder ensemble statistics"},
      {"tapering", "C_F constants of tapering profiles"},
      {"validate-config", "Check a config without running it"},
  };
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help));

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    const Config cfg = Config::load(config_path);
    validate_schema(cfg);
    if (sub == "validate-config") {
      std::cout << config_path << ": ok (" << cfg.command() << ")\n";
      return 0;
    }
    if (cfg.command() != sub) {
      cfg.fail("/command", "config is for '" + cfg.command() + "', not '" + sub + "'");
    }
    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    if (app.get_subcommands().front()->count("--seed-override")) ctx.seed_override = seed_override;

    const auto t0 = std::chrono::steady_clock::now();
    CommandResult res = run_command(cfg, ctx);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (emit_plot) res.outputs.push_back(write_plot_script(cfg, ctx, res));
    const std::string manifest = write_manifest(cfg, ctx, res, runtime);
    for (const auto& f : res.outputs) std::cout << (ctx.out_dir / f).string() << "\n";
    std::cout << (ctx.out_dir / manifest).string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const sloc::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const sloc::ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverError;
  }
}
