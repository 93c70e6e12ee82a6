#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <sloc/anderson.hpp>
#include <sloc/bounds.hpp>
#include <sloc/lattice.hpp>
#include <sloc/localizer.hpp>

#include "config.hpp"

namespace sloc::cli {

struct RunContext {
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
};

struct CommandResult {
  std::vector<std::string> outputs;  ///< file names relative to out_dir
  nlohmann::json summary;
};

// Config -> library objects.
Model build_model(const Config& cfg);
Vec2 probe_center(const Config& cfg, const SiteLattice& lat);
BoundParams bound_params(const Config& cfg);
std::optional<DisorderSpec> disorder_spec(const Config& cfg, const RunContext& ctx);
EnsembleSpec ensemble_spec(const Config& cfg, const RunContext& ctx);

nlohmann::json to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_spec_from_json(const nlohmann::json& j);

CommandResult cmd_local_gap(const Config& cfg, const RunContext& ctx);
CommandResult cmd_kappa_bounds(const Config& cfg, const RunContext& ctx);
CommandResult cmd_localizer(const Config& cfg, const RunContext& ctx);
CommandResult cmd_flow(const Config& cfg, const RunContext& ctx);
CommandResult cmd_anderson(const Config& cfg, const RunContext& ctx);
CommandResult cmd_tapering(const Config& cfg, const RunContext& ctx);

/// Dispatches on the config's "command" after schema validation.
CommandResult run_command(const Config& cfg, const RunContext& ctx);

/// manifest.json: command, config hash, versions, runtime and outputs.
std::string write_manifest(const Config& cfg, const RunContext& ctx, const CommandResult& res,
                           double runtime_s);

/// A matplotlib script plotting every CSV output against its first column.
std::string write_plot_script(const Config& cfg, const RunContext& ctx, const CommandResult& res);

}  // namespace sloc::cli
