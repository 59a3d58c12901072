// Experiment driver: tsi <experiment> [--config PATH] [--out DIR] [--reproducible]
#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "tsi/experiments.hpp"
#include "tsi/io.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

tsi::ExperimentConfig load_config(const std::string& experiment, const std::string& path) {
  if (path.empty()) return tsi::default_config(experiment);
  const tsi::ExperimentConfig config = tsi::parse_config(tsi::read_text(path), experiment);
  if (config.experiment != experiment)
    throw tsi::ConfigError("experiment: config file is for '" + config.experiment + "', not '" + experiment + "'");
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transformed snapshot interpolation experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool reproducible = false, print_config = false;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_flag("--reproducible", reproducible, "Omit wall-clock data from the manifest");
  app.add_flag("--print-config", print_config, "Print the effective config and exit");

  const std::pair<const char*, const char*> commands[] = {
      {"gaussian1d", "Cut-off Gaussian error table with exact shifts"},
      {"burgers2d", "2D Burgers reconstruction with optimized polynomial transforms"},
      {"image-align", "Image-frame alignment (synthetic disks or PGM frames)"},
      {"two-boxes", "Chained versus direct monotone-map optimization"},
      {"widths", "Linear width decay of the transport manifold"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  tsi::ExperimentConfig config;
  try {
    config = load_config(experiment, config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (reproducible) config.reproducible = true;
    config.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  }
  if (print_config) {
    std::fputs(tsi::serialize_config(config).c_str(), stdout);
    return 0;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const tsi::Artifacts artifacts = tsi::run_experiment(config);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    tsi::write_run(config.output_dir, config, artifacts, elapsed);
    for (const auto& [key, value] : artifacts.summary) std::printf("%s = %.12g\n", key.c_str(), value);
    std::printf("wrote %s\n", config.output_dir.c_str());
  } catch (const tsi::DescentAborted& e) {
    std::fprintf(stderr, "numerical failure after %zu steps: %s\n", e.partial().trace.size(), e.what());
    return exit_numerical;
  } catch (const tsi::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return exit_numerical;
  } catch (const tsi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const tsi::FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
