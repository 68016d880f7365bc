// dsr: depression-severity pipeline driver.
//
// Subcommands mirror the pipeline stages: synth, extract, encode, train,
// predict, fuse, eval, and pipeline (all stages chained). Every flag can
// also be set through a DSR_-prefixed environment variable (e.g. DSR_SEED,
// DSR_OUT); explicit flags win.
//
// Exit codes: 0 success, 2 missing input files, 3 validation/parse
// failure, 4 numeric failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dsr/pipeline/run.hpp"

namespace {

struct CliOptions {
  dsr::PipelineConfig config;
  std::string grid_spec;  // "cmin:cmax,gmin:gmax"
};

dsr::GridSpec parse_grid_spec(const std::string& spec) {
  const auto parts = dsr::csv::split(spec, ',');
  if (parts.size() != 2)
    throw dsr::ValidationError("--grid expects 'cmin:cmax,gmin:gmax', got '" + spec + "'");
  auto range = [&](const std::string& s) {
    const auto bounds = dsr::csv::split(s, ':');
    if (bounds.size() != 2)
      throw dsr::ValidationError("--grid range '" + s + "' must be 'lo:hi'");
    const int lo = std::stoi(bounds[0]), hi = std::stoi(bounds[1]);
    if (lo > hi) throw dsr::ValidationError("--grid range '" + s + "' has lo > hi");
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  };
  dsr::GridSpec grid;
  grid.c_exponents = range(parts[0]);
  grid.gamma_exponents = range(parts[1]);
  return grid;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt, bool needs_manifest) {
  auto* manifest = cmd->add_option("--manifest", opt.config.manifest_path,
                                   "Session manifest JSON (defaults to <out>/corpus/manifest.json)")
                       ->envname("DSR_MANIFEST");
  if (needs_manifest) (void)manifest;
  cmd->add_option("--out", opt.config.out_dir, "Output directory for stage artifacts")
      ->envname("DSR_OUT")
      ->required();
  cmd->add_option("--seed", opt.config.seed, "Base seed; per-stage seeds derive from it")
      ->envname("DSR_SEED");
  cmd->add_option("--jobs", opt.config.jobs, "Session-level worker threads")->envname("DSR_JOBS");
  cmd->add_option("--k", opt.config.gmm_k, "GMM component count")->envname("DSR_K");
  cmd->add_option("--subsample", opt.config.subsample, "Keep every Nth valid landmark frame")
      ->envname("DSR_SUBSAMPLE");
  cmd->add_option("--fps", opt.config.fps, "Landmark frame rate")->envname("DSR_FPS");
  cmd->add_option("--fusion", opt.config.fusion, "Fusion strategy: mean, max or search")
      ->envname("DSR_FUSION");
  cmd->add_option("--grid", opt.grid_spec,
                  "SVM exponent grid as 'cmin:cmax,gmin:gmax' (base-2 exponents)")
      ->envname("DSR_GRID");
  cmd->add_option("--sessions", opt.config.synth_sessions, "Synthetic corpus size (synth/pipeline)")
      ->envname("DSR_SESSIONS");
  cmd->add_option("--duration", opt.config.synth.duration, "Synthetic session length in seconds")
      ->envname("DSR_DURATION");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal PHQ-8 severity pipeline"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string stage;
  for (const char* name : {"synth", "extract", "encode", "train", "predict", "fuse", "eval", "pipeline"}) {
    auto* cmd = app.add_subcommand(name, std::string("Run the ") + name + " stage");
    add_common_flags(cmd, opt, std::string(name) != "synth");
    cmd->callback([&stage, name] { stage = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.grid_spec.empty()) opt.config.grid = parse_grid_spec(opt.grid_spec);
    const auto& cfg = opt.config;
    if (stage == "synth") {
      run_synth(cfg);
    } else if (stage == "extract") {
      run_extract(cfg);
    } else if (stage == "encode") {
      run_encode(cfg);
    } else if (stage == "train") {
      run_train(cfg);
    } else if (stage == "predict") {
      run_predict(cfg);
    } else if (stage == "fuse") {
      run_fuse(cfg);
    } else if (stage == "eval" || stage == "pipeline") {
      const auto rows = stage == "eval" ? dsr::run_eval(cfg) : dsr::run_pipeline(cfg);
      for (const auto& row : rows)
        std::cout << row.name << " " << row.split << " RMSE=" << row.report.rmse
                  << " MAE=" << row.report.mae << "\n";
    }
  } catch (const dsr::IoError& e) {
    std::cerr << "error (missing input): " << e.what() << "\n";
    return 2;
  } catch (const dsr::ParseError& e) {
    std::cerr << "error (parse): " << e.what() << "\n";
    return 3;
  } catch (const dsr::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 3;
  } catch (const dsr::NumericError& e) {
    std::cerr << "error (numeric): " << e.what() << "\n";
    return 4;
  }
  return 0;
}
