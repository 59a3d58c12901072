#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsi {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Settings of one experiment run. Text form: one `key = value` per line with
/// dotted keys, `#` comments, lists comma separated. A resolution of 0 in
/// `snapshots.h` stands for exact snapshots and is written as `exact`.
struct ExperimentConfig {
  std::string experiment = "gaussian1d";
  std::string model = "gaussian1d";

  std::vector<int> node_counts;
  std::string node_policy = "uniform";   // uniform | chebyshev | explicit
  std::vector<double> node_values;       // explicit nodes
  std::string inner_policy = "same";     // same | uniform | chebyshev
  int inner_count = 0;

  std::vector<double> resolutions;       // snapshot spacing h
  std::string transform_family = "shift";
  std::vector<int> poly_degrees{1, 2, 2, 0};  // px, py, qx, qy
  int knots = 11;
  double bound = 0.5;

  double alpha = 1e-3;
  double beta = 0.1;
  int steps = 500;
  std::string direction = "unit_max";
  int refine = 1;

  std::vector<double> training;
  std::vector<double> targets;
  int target_count = 21;
  std::vector<double> chain;

  int width_params = 257;
  int width_space_cells = 512;
  int width_time_cells = 512;
  int width_n_max = 64;
  int width_fit_lo = 4;
  int width_fit_hi = 64;

  std::vector<std::string> frames;       // PGM paths; empty selects synthetic frames
  std::string training_frame;
  int image_size = 64;
  double disk_radius = 10.0;
  double disk_shift = 10.0;

  std::string output_dir = "out";
  unsigned seed = 1;
  bool reproducible = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

std::vector<std::string> experiment_ids();

/// Defaults reproducing the published setup of an experiment.
ExperimentConfig default_config(const std::string& experiment);

/// Starts from default_config of the text's `experiment` key, or of
/// `fallback_experiment` when the key is absent, then applies every key.
/// Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& fallback_experiment = "");
std::string serialize_config(const ExperimentConfig& config);

}  // namespace tsi
