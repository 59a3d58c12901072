#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tsi/config.hpp"
#include "tsi/optim.hpp"
#include "tsi/widths.hpp"

namespace tsi {

/// Named output files of a run; contents are written verbatim.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  // Headline numbers, also written as summary.csv.
  std::vector<std::pair<std::string, double>> summary;

  double value(const std::string& key) const;
};

/// Interpolation nodes for count `n` under the configured policy.
LagrangeSystemd make_nodes(const ExperimentConfig& config, int n, double lo, double hi);

struct GaussianRow {
  int n = 0;
  std::vector<double> tsi;  // per entry of `resolutions`; 0 there means exact snapshots
  double id = 0.0;          // interpolation of exact snapshots without transforms
};

struct GaussianResult {
  std::vector<double> resolutions;
  std::vector<double> snapshot_errors;  // max over all nodes used; 0 for exact
  std::vector<GaussianRow> rows;
};

/// Max L1 error over the targets of TSI with exact shifts, for every node
/// count and snapshot resolution.
GaussianResult run_gaussian1d(const ExperimentConfig& config);
Artifacts gaussian1d_artifacts(const GaussianResult& result);

struct BurgersTarget {
  double mu = 0.0;
  double plain_error = 0.0;
  double tsi_error = 0.0;
  GridFieldd plain;
  GridFieldd tsi;
  GridFieldd exact;
};

struct BurgersResult {
  std::vector<double> snapshot_errors;  // per node
  double snapshot_error = 0.0;          // max
  DescentResult descent;
  std::vector<BurgersTarget> targets;
};

BurgersResult run_burgers2d(const ExperimentConfig& config);
Artifacts burgers2d_artifacts(const BurgersResult& result);

struct ImageTarget {
  double mu = 0.0;
  double linear_error = 0.0;  // against the truth frame; NaN without one
  double tsi_error = 0.0;
  GridFieldd linear;
  GridFieldd tsi;
};

struct ImageResult {
  DescentResult descent;
  std::vector<ImageTarget> targets;
};

/// Disk of `radius` pixels on a square image, centre shifted by `offset`
/// pixels in x from the image centre.
GridFieldd disk_frame(int size, double radius, double offset);

ImageResult run_image_alignment(const ExperimentConfig& config);
Artifacts image_artifacts(const ImageResult& result);

struct TwoBoxesResult {
  ChainResult chain;
  ChainResult direct;
  double chain_error = 0.0;
  double direct_error = 0.0;
  double direct_initial_error = 0.0;
};

TwoBoxesResult run_two_boxes(const ExperimentConfig& config);
Artifacts two_boxes_artifacts(const TwoBoxesResult& result);

struct WidthsResult {
  std::vector<WidthRow> rows;
  SlopeFit l1_fit;
  SlopeFit l2_fit;
  SlopeFit baseline_fit;
  double l1_slope_half_resolution = 0.0;  // same fit on a grid coarsened by two
};

WidthsResult run_widths(const ExperimentConfig& config);
Artifacts widths_artifacts(const WidthsResult& result);

/// Runs the configured experiment.
Artifacts run_experiment(const ExperimentConfig& config);

/// Writes the artifacts, summary.csv and manifest.txt (config echo and FNV-1a
/// checksums) into `dir`. Wall time is recorded only outside reproducible mode.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const Artifacts& artifacts,
               double elapsed_seconds);

}  // namespace tsi
