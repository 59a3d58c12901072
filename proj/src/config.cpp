#include "tsi/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "tsi/optim.hpp"

namespace tsi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  std::string token;
  while (std::getline(in, token, ',')) out.push_back(trim(token));
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key + ": '" + s + "' is not a finite number");
}

long parse_long(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key + ": '" + s + "' is not an integer");
}

int parse_int(const std::string& key, const std::string& s) {
  const long v = parse_long(key, s);
  if (v < -2147483647L || v > 2147483647L) throw ConfigError(key + ": integer out of range");
  return int(v);
}

struct Entry {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

Entry text(std::string key, std::string ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return c.*m; },
          [m](ExperimentConfig& c, const std::string& v) { c.*m = v; }};
}

Entry real(std::string key, double ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return format_double(c.*m); },
          [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_double(key, v); }};
}

Entry integer(std::string key, int ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
          [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_int(key, v); }};
}

Entry flag(std::string key, bool ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); },
          [m, key](ExperimentConfig& c, const std::string& v) {
            if (v == "true") c.*m = true;
            else if (v == "false") c.*m = false;
            else throw ConfigError(key + ": expected true or false");
          }};
}

Entry reals(std::string key, std::vector<double> ExperimentConfig::*m, bool exact_zero = false) {
  return {key,
          [m, exact_zero](const ExperimentConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < (c.*m).size(); ++i) {
              if (i > 0) out += ",";
              const double v = (c.*m)[i];
              out += exact_zero && v == 0.0 ? std::string("exact") : format_double(v);
            }
            return out;
          },
          [m, key, exact_zero](ExperimentConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const auto& t : split_list(v)) out.push_back(exact_zero && t == "exact" ? 0.0 : parse_double(key, t));
            c.*m = out;
          }};
}

Entry integers(std::string key, std::vector<int> ExperimentConfig::*m) {
  return {key,
          [m](const ExperimentConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < (c.*m).size(); ++i) out += (i > 0 ? "," : "") + std::to_string((c.*m)[i]);
            return out;
          },
          [m, key](ExperimentConfig& c, const std::string& v) {
            std::vector<int> out;
            for (const auto& t : split_list(v)) out.push_back(parse_int(key, t));
            c.*m = out;
          }};
}

Entry texts(std::string key, std::vector<std::string> ExperimentConfig::*m) {
  return {key,
          [m](const ExperimentConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < (c.*m).size(); ++i) out += (i > 0 ? "," : "") + (c.*m)[i];
            return out;
          },
          [m](ExperimentConfig& c, const std::string& v) { c.*m = split_list(v); }};
}

const std::vector<Entry>& entries() {
  using C = ExperimentConfig;
  static const std::vector<Entry> table = {
      text("experiment", &C::experiment),
      text("model", &C::model),
      integers("nodes.counts", &C::node_counts),
      text("nodes.policy", &C::node_policy),
      reals("nodes.values", &C::node_values),
      text("nodes.inner", &C::inner_policy),
      integer("nodes.inner_count", &C::inner_count),
      reals("snapshots.h", &C::resolutions, true),
      text("transform.family", &C::transform_family),
      integers("transform.degrees", &C::poly_degrees),
      integer("transform.knots", &C::knots),
      real("transform.bound", &C::bound),
      real("schedule.alpha", &C::alpha),
      real("schedule.beta", &C::beta),
      integer("schedule.steps", &C::steps),
      text("schedule.direction", &C::direction),
      integer("schedule.refine", &C::refine),
      reals("training.mu", &C::training),
      reals("targets.mu", &C::targets),
      integer("targets.count", &C::target_count),
      reals("chain.mu", &C::chain),
      integer("widths.params", &C::width_params),
      integer("widths.space_cells", &C::width_space_cells),
      integer("widths.time_cells", &C::width_time_cells),
      integer("widths.n_max", &C::width_n_max),
      integer("widths.fit_lo", &C::width_fit_lo),
      integer("widths.fit_hi", &C::width_fit_hi),
      texts("image.frames", &C::frames),
      text("image.training", &C::training_frame),
      integer("image.size", &C::image_size),
      real("image.disk_radius", &C::disk_radius),
      real("image.disk_shift", &C::disk_shift),
      text("output.dir", &C::output_dir),
      {"seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, const std::string& v) {
         const long s = parse_long("seed", v);
         if (s < 0 || s > 4294967295L) throw ConfigError("seed: out of range");
         c.seed = unsigned(s);
       }},
      flag("reproducible", &C::reproducible),
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

bool increasing(const std::vector<double>& v) { return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end(); }

}  // namespace

std::vector<std::string> experiment_ids() { return {"gaussian1d", "burgers2d", "image-align", "two-boxes", "widths"}; }

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "gaussian1d") {
    c.model = "gaussian1d";
    c.node_counts = {2, 3, 4, 5, 6, 7, 8, 9};
    c.node_policy = "chebyshev";
    c.resolutions = {0.1, 0.01, 0.001, 0.0001, 0.0};
    c.transform_family = "shift";
    c.target_count = 21;
  } else if (experiment == "burgers2d") {
    c.model = "burgers2d";
    c.node_policy = "explicit";
    c.node_values = {0.3, 0.5};
    c.resolutions = {0.01};
    c.transform_family = "poly2d";
    c.poly_degrees = {1, 2, 2, 0};
    c.training = {0.4};
    c.targets = {0.45};
  } else if (experiment == "image-align") {
    c.model = "image";
    c.node_policy = "explicit";
    c.node_values = {0.0, 1.0};
    c.transform_family = "poly2d";
    c.poly_degrees = {1, 3, 3, 1};
    c.alpha = 1e-2;
    c.steps = 300;
    c.training = {0.5};
    c.targets = {0.5};
  } else if (experiment == "two-boxes") {
    c.model = "two_boxes";
    c.resolutions = {0.01};
    c.transform_family = "monotone1d";
    c.knots = 111;
    c.bound = 0.5;
    c.alpha = 0.1;
    c.beta = 0.5;
    c.steps = 600;
    c.refine = 10;
    c.chain = {0.0, 0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.8, 3.2, 3.6, 3.8};
  } else if (experiment == "widths") {
    c.model = "transport";
  } else {
    throw ConfigError("experiment: unknown id '" + experiment + "'");
  }
  return c;
}

void ExperimentConfig::validate() const {
  const auto ids = experiment_ids();
  require(std::find(ids.begin(), ids.end(), experiment) != ids.end(), "experiment", "unknown id '" + experiment + "'");
  if (experiment == "gaussian1d") require(model == "gaussian1d" || model == "mollifier1d", "model", "needs a cut-off model");
  if (experiment == "burgers2d") require(model == "burgers2d", "model", "must be burgers2d");
  if (experiment == "two-boxes") require(model == "two_boxes", "model", "must be two_boxes");

  require(node_policy == "uniform" || node_policy == "chebyshev" || node_policy == "explicit", "nodes.policy",
          "expected uniform, chebyshev or explicit");
  require(inner_policy == "same" || inner_policy == "uniform" || inner_policy == "chebyshev", "nodes.inner",
          "expected same, uniform or chebyshev");
  require(inner_policy == "same" || inner_count >= 1, "nodes.inner_count", "must be >= 1");
  for (int n : node_counts) require(n >= 1, "nodes.counts", "counts must be >= 1");
  require(increasing(node_values), "nodes.values", "must be strictly increasing");
  if (experiment == "gaussian1d") require(!node_counts.empty(), "nodes.counts", "must not be empty");
  if (experiment == "burgers2d" || experiment == "image-align")
    require(node_policy == "explicit" && node_values.size() >= 2, "nodes.values", "needs at least two explicit nodes");
  for (double h : resolutions) require(h >= 0.0, "snapshots.h", "must be positive or exact");
  if (experiment == "burgers2d" || experiment == "two-boxes")
    require(resolutions.size() == 1 && resolutions[0] > 0.0, "snapshots.h", "needs exactly one positive spacing");

  require(transform_family == "shift" || transform_family == "poly2d" || transform_family == "monotone1d",
          "transform.family", "expected shift, poly2d or monotone1d");
  require(poly_degrees.size() == 4, "transform.degrees", "expected px,py,qx,qy");
  for (int d : poly_degrees) require(d >= 0, "transform.degrees", "must be >= 0");
  require(knots >= 2, "transform.knots", "must be >= 2");
  require(bound > 0.0, "transform.bound", "must be positive");

  require(alpha > 0.0, "schedule.alpha", "must be positive");
  require(beta > 0.0 && beta < 1.0, "schedule.beta", "must lie in (0, 1)");
  require(steps >= 0, "schedule.steps", "must be >= 0");
  try {
    parse_step_direction(direction);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule.direction: ") + e.what());
  }
  require(refine >= 1, "schedule.refine", "must be >= 1");
  require(target_count >= 1, "targets.count", "must be >= 1");
  if (experiment == "burgers2d" || experiment == "image-align") {
    require(!training.empty(), "training.mu", "must not be empty");
    require(!targets.empty(), "targets.mu", "must not be empty");
  }
  if (experiment == "two-boxes") require(chain.size() >= 2 && increasing(chain), "chain.mu", "needs >= 2 increasing values");

  require(width_params >= 2, "widths.params", "must be >= 2");
  require(width_space_cells >= 1 && width_time_cells >= 1, "widths.space_cells", "cell counts must be >= 1");
  require(width_n_max >= 1 && width_n_max < width_params, "widths.n_max", "must lie in [1, params)");
  require(width_fit_lo >= 1 && width_fit_lo < width_fit_hi && width_fit_hi <= width_n_max, "widths.fit_lo",
          "fit range must satisfy 1 <= lo < hi <= n_max");

  if (experiment == "image-align") {
    require(frames.empty() || frames.size() == node_values.size(), "image.frames", "one frame per node required");
    require(frames.empty() || !training_frame.empty(), "image.training", "required with image.frames");
    require(image_size >= 8, "image.size", "must be >= 8");
    require(disk_radius > 0.0 && 2.0 * disk_radius + disk_shift < image_size, "image.disk_radius",
            "disk pair must fit the image");
  }
  require(!output_dir.empty(), "output.dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& fallback_experiment) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(key + ": set more than once");
    pairs.emplace_back(key, trim(line.substr(eq + 1)));
  }

  ExperimentConfig config;
  if (!fallback_experiment.empty()) config = default_config(fallback_experiment);
  for (const auto& [key, value] : pairs)
    if (key == "experiment") config = default_config(value);

  const auto& table = entries();
  for (const auto& [key, value] : pairs) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.key == key; });
    if (it == table.end()) throw ConfigError(key + ": unknown key");
    it->set(config, value);
  }
  return config;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(config) + "\n";
  return out;
}

}  // namespace tsi
