#include "tsi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "tsi/io.hpp"
#include "tsi/models.hpp"

namespace tsi {

namespace {

using PointFn = std::function<double(const Pointd&)>;

int cells_for(double length, double h) {
  const long cells = std::lround(length / h);
  if (cells < 1) throw ConfigError("snapshots.h: spacing exceeds the domain");
  return int(cells);
}

std::vector<double> target_sweep(const ExperimentConfig& config, double lo, double hi) {
  if (!config.targets.empty()) return config.targets;
  std::vector<double> out;
  const int count = config.target_count;
  for (int t = 0; t < count; ++t) out.push_back(count == 1 ? lo : t + 1 == count ? hi : lo + (hi - lo) * t / (count - 1));
  return out;
}

LagrangeSystemd explicit_nodes(const std::vector<double>& values) {
  Eigen::VectorXd nodes(Eigen::Index(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) nodes[Eigen::Index(k)] = values[k];
  return LagrangeSystemd(nodes, values.front(), values.back());
}

LagrangeSystemd inner_nodes(const ExperimentConfig& config, const LagrangeSystemd& outer) {
  if (config.inner_policy == "same") return outer;
  if (config.inner_policy == "uniform") return uniform_nodes(config.inner_count, outer.lower(), outer.upper());
  return chebyshev_nodes(config.inner_count, outer.lower(), outer.upper());
}

SubgradSchedule schedule_of(const ExperimentConfig& config) {
  SubgradSchedule s;
  s.alpha = config.alpha;
  s.beta = config.beta;
  s.steps = config.steps;
  s.direction = parse_step_direction(config.direction);
  return s;
}

PolyDegrees degrees_of(const ExperimentConfig& config) {
  PolyDegrees d;
  d.px = config.poly_degrees[0];
  d.py = config.poly_degrees[1];
  d.qx = config.poly_degrees[2];
  d.qy = config.poly_degrees[3];
  return d;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string line;
  for (double v : values) line += (line.empty() ? "" : ",") + format_number(v);
  return line + "\n";
}

std::string field_csv(const GridFieldd& f) {
  std::ostringstream out;
  write_field_csv(out, f);
  return out.str();
}

std::string pgm(const GridFieldd& f) {
  std::ostringstream out;
  write_pgm(out, f);
  return out.str();
}

std::string checkpoint(const TransformTabled& table) {
  std::ostringstream out;
  write_checkpoint(out, table);
  return out.str();
}

// A single-parameter sample of a 2D problem: snapshots, transform table and
// training pairs at the configured nodes.
TrainingProblem training_problem(const ExperimentConfig& config, std::vector<GridFieldd> fields,
                                 std::vector<TrainingPaird> training, const Domaind& domain) {
  const auto outer = explicit_nodes(config.node_values);
  const auto inner = inner_nodes(config, outer);
  TrainingProblem p;
  p.snapshots = SnapshotSetd(outer, std::move(fields));
  p.table = TransformTabled::identity(outer, inner, Transformd(PolyTransform2Dd(domain, degrees_of(config))));
  p.training = std::move(training);
  p.schedule = schedule_of(config);
  p.refine = config.refine;
  return p;
}

}  // namespace

double Artifacts::value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw std::out_of_range("no summary value '" + key + "'");
}

LagrangeSystemd make_nodes(const ExperimentConfig& config, int n, double lo, double hi) {
  if (config.node_policy == "chebyshev") return chebyshev_nodes(n, lo, hi);
  if (config.node_policy == "explicit") return explicit_nodes(config.node_values);
  return uniform_nodes(n, lo, hi);
}

GaussianResult run_gaussian1d(const ExperimentConfig& config) {
  config.validate();
  const ParametricModel model = make_model(config.model);
  const auto targets = target_sweep(config, model.mu_min, model.mu_max);
  const int exact_cells = 2000;

  GaussianResult result;
  result.resolutions = config.resolutions;
  result.snapshot_errors.assign(config.resolutions.size(), 0.0);
  for (int n : config.node_counts) {
    const auto outer = make_nodes(config, n, model.mu_min, model.mu_max);
    const auto inner = inner_nodes(config, outer);
    const auto table = TransformTabled::from_function(
        outer, inner, [&](double nu, double eta) { return Transformd(exact_shift(model, nu, eta)); });

    GaussianRow row;
    row.n = n;
    for (std::size_t r = 0; r < config.resolutions.size(); ++r) {
      const double h = config.resolutions[r];
      double worst = 0.0;
      if (h == 0.0) {
        // Exact snapshots, continued past the domain where a shift leaves it.
        for (double mu : targets) {
          const auto approx = [&](const Pointd& x) { return exact_shift_tsi(model, outer, mu, x); };
          worst = std::max(worst, l1_error_adaptive(approx, model.at(mu), model.domain, Cells{exact_cells, 0}));
        }
      } else {
        const Cells cells{cells_for(model.domain.length(0), h), 0};
        std::vector<GridFieldd> fields;
        for (Eigen::Index k = 0; k < outer.size(); ++k) {
          fields.push_back(sample(model.at(outer.node(k)), model.domain, cells));
          result.snapshot_errors[r] =
              std::max(result.snapshot_errors[r], l1_error_adaptive(fields.back(), model.at(outer.node(k))));
        }
        for (double mu : targets) {
          const auto ev = make_tsi_evaluator<double, GridFieldd>(outer, fields, table, mu);
          worst = std::max(worst, l1_error_adaptive(ev, model.at(mu), model.domain, cells));
        }
      }
      row.tsi.push_back(worst);
    }

    std::vector<PointFn> exact;
    for (Eigen::Index k = 0; k < outer.size(); ++k) exact.push_back(model.at(outer.node(k)));
    for (double mu : targets) {
      const auto ev = make_plain_evaluator<double, PointFn>(outer, exact, mu);
      row.id = std::max(row.id, l1_error_adaptive(ev, model.at(mu), model.domain, Cells{exact_cells, 0}));
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

Artifacts gaussian1d_artifacts(const GaussianResult& result) {
  Artifacts a;
  std::string header = "n";
  for (double h : result.resolutions) header += h == 0.0 ? ",exact" : ",h_" + format_number(h);
  std::string table = header + ",id\n";
  for (const auto& row : result.rows) {
    table += std::to_string(row.n);
    for (double e : row.tsi) table += "," + format_number(e);
    table += "," + format_number(row.id) + "\n";
  }
  std::string snapshots = "h,max_snapshot_error\n";
  for (std::size_t r = 0; r < result.resolutions.size(); ++r)
    if (result.resolutions[r] > 0.0) snapshots += csv_row({result.resolutions[r], result.snapshot_errors[r]});
  a.files = {{"errors.csv", table}, {"snapshot_errors.csv", snapshots}};
  if (!result.rows.empty()) {
    const auto& last = result.rows.back();
    a.summary.emplace_back("n_max", last.n);
    for (std::size_t r = 0; r < result.resolutions.size(); ++r)
      a.summary.emplace_back(result.resolutions[r] == 0.0 ? "exact_at_n_max" : "h_" + format_number(result.resolutions[r]) + "_at_n_max",
                             last.tsi[r]);
    a.summary.emplace_back("id_at_n_max", last.id);
  }
  return a;
}

BurgersResult run_burgers2d(const ExperimentConfig& config) {
  config.validate();
  const ParametricModel model = make_model(config.model);
  const double h = config.resolutions.front();
  const Cells cells{cells_for(model.domain.length(0), h), cells_for(model.domain.length(1), h)};

  BurgersResult result;
  std::vector<GridFieldd> fields;
  for (double t : config.node_values) {
    fields.push_back(sample(model.at(t), model.domain, cells));
    result.snapshot_errors.push_back(l1_error_adaptive(fields.back(), model.at(t)));
    result.snapshot_error = std::max(result.snapshot_error, result.snapshot_errors.back());
  }
  std::vector<TrainingPaird> training;
  for (double t : config.training) training.push_back({t, sample(model.at(t), model.domain, cells)});
  const TrainingProblem problem = training_problem(config, fields, std::move(training), model.domain);
  result.descent = subgradient_descent(problem);

  for (double mu : config.targets) {
    BurgersTarget target;
    target.mu = mu;
    const auto plain = make_plain_evaluator<double, GridFieldd>(problem.snapshots.system, problem.snapshots.fields, mu);
    const auto tsi = make_tsi_evaluator<double, GridFieldd>(problem.snapshots.system, problem.snapshots.fields,
                                                            result.descent.table, mu);
    target.plain_error = l1_error_adaptive(plain, model.at(mu), model.domain, cells);
    target.tsi_error = l1_error_adaptive(tsi, model.at(mu), model.domain, cells);
    target.plain = sample(plain, model.domain, cells);
    target.tsi = sample(tsi, model.domain, cells);
    target.exact = sample(model.at(mu), model.domain, cells);
    result.targets.push_back(std::move(target));
  }
  return result;
}

Artifacts burgers2d_artifacts(const BurgersResult& result) {
  Artifacts a;
  std::string errors = "mu,plain_error,tsi_error\n";
  for (const auto& t : result.targets) {
    errors += csv_row({t.mu, t.plain_error, t.tsi_error});
    const std::string tag = format_number(t.mu);
    a.files.emplace_back("plain_" + tag + ".csv", field_csv(t.plain));
    a.files.emplace_back("tsi_" + tag + ".csv", field_csv(t.tsi));
    a.files.emplace_back("exact_" + tag + ".csv", field_csv(t.exact));
  }
  a.files.emplace_back("errors.csv", errors);
  a.files.emplace_back("trace.csv", trace_csv(result.descent.trace));
  a.files.emplace_back("transforms.csv", checkpoint(result.descent.table));
  a.summary.emplace_back("snapshot_error_max", result.snapshot_error);
  a.summary.emplace_back("training_sigma_identity", result.descent.trace.front().sigma);
  a.summary.emplace_back("training_sigma_best", result.descent.best_sigma);
  if (!result.targets.empty()) {
    a.summary.emplace_back("plain_error", result.targets.front().plain_error);
    a.summary.emplace_back("tsi_error", result.targets.front().tsi_error);
  }
  return a;
}

GridFieldd disk_frame(int size, double radius, double offset) {
  const double centre = 0.5 * (size - 1);
  const double scale = size - 1;
  return sample(
      [&](const Pointd& p) {
        const double dx = p[0] * scale - centre - offset, dy = p[1] * scale - centre;
        return dx * dx + dy * dy <= radius * radius ? 1.0 : 0.0;
      },
      Domaind::rectangle(0.0, 1.0, 0.0, 1.0), Cells{size - 1, size - 1});
}

ImageResult run_image_alignment(const ExperimentConfig& config) {
  config.validate();
  const auto& nodes = config.node_values;
  const bool synthetic = config.frames.empty();
  // Synthetic frames: the disk moves linearly in the parameter by disk_shift
  // pixels between the first and last node.
  const auto synthetic_frame = [&](double mu) {
    const double s = (mu - nodes.front()) / (nodes.back() - nodes.front());
    return disk_frame(config.image_size, config.disk_radius, config.disk_shift * (s - 0.5));
  };

  std::vector<GridFieldd> fields;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    fields.push_back(synthetic ? synthetic_frame(nodes[k]) : load_pgm(config.frames[k]));
  for (const auto& f : fields)
    if (!f.same_shape(fields.front())) throw FormatError("image-align: frames differ in size");

  std::vector<TrainingPaird> training;
  for (double mu : config.training) {
    GridFieldd truth = synthetic ? synthetic_frame(mu) : load_pgm(config.training_frame);
    if (!truth.same_shape(fields.front())) throw FormatError("image-align: training frame differs in size");
    training.push_back({mu, std::move(truth)});
  }
  const TrainingProblem problem = training_problem(config, fields, training, fields.front().domain());

  ImageResult result;
  result.descent = subgradient_descent(problem);
  for (double mu : config.targets) {
    ImageTarget target;
    target.mu = mu;
    target.linear = plain_interpolation(problem.snapshots, mu);
    target.tsi = tsi_reconstruct(problem.snapshots, result.descent.table, mu).field;
    std::optional<GridFieldd> truth;
    if (synthetic) truth = synthetic_frame(mu);
    else if (config.training.size() == 1 && config.training.front() == mu) truth = training.front().truth;
    target.linear_error = truth ? l1_distance(target.linear, *truth) : std::numeric_limits<double>::quiet_NaN();
    target.tsi_error = truth ? l1_distance(target.tsi, *truth) : std::numeric_limits<double>::quiet_NaN();
    result.targets.push_back(std::move(target));
  }
  return result;
}

Artifacts image_artifacts(const ImageResult& result) {
  Artifacts a;
  std::string errors = "mu,linear_error,tsi_error\n";
  for (const auto& t : result.targets) {
    errors += csv_row({t.mu, t.linear_error, t.tsi_error});
    const std::string tag = format_number(t.mu);
    a.files.emplace_back("linear_" + tag + ".pgm", pgm(t.linear));
    a.files.emplace_back("tsi_" + tag + ".pgm", pgm(t.tsi));
  }
  a.files.emplace_back("errors.csv", errors);
  a.files.emplace_back("trace.csv", trace_csv(result.descent.trace));
  a.files.emplace_back("transforms.csv", checkpoint(result.descent.table));
  a.summary.emplace_back("training_sigma_identity", result.descent.trace.front().sigma);
  a.summary.emplace_back("training_sigma_best", result.descent.best_sigma);
  if (!result.targets.empty()) {
    const auto& t = result.targets.front();
    a.summary.emplace_back("linear_error", t.linear_error);
    a.summary.emplace_back("tsi_error", t.tsi_error);
    a.summary.emplace_back("error_ratio", t.tsi_error / t.linear_error);
  }
  return a;
}

TwoBoxesResult run_two_boxes(const ExperimentConfig& config) {
  config.validate();
  const ParametricModel model = make_model(config.model);
  const Cells cells{cells_for(model.domain.length(0), config.resolutions.front()), 0};

  ChainProblem chain;
  chain.mu = config.chain;
  for (double mu : chain.mu) chain.fields.push_back(sample(model.at(mu), model.domain, cells));
  chain.templ = MonotoneTransform1Dd(model.domain, config.knots);
  chain.bound = config.bound;
  chain.schedule = schedule_of(config);
  chain.refine = config.refine;

  ChainProblem direct = chain;
  direct.mu = {chain.mu.front(), chain.mu.back()};
  direct.fields = {chain.fields.front(), chain.fields.back()};

  TwoBoxesResult result;
  result.chain = chain_optimize(chain);
  result.direct = chain_optimize(direct);
  result.chain_error = result.chain.errors.back();
  result.direct_error = result.direct.errors.back();
  result.direct_initial_error = l1_distance(direct.fields.front(), direct.fields.back());
  return result;
}

Artifacts two_boxes_artifacts(const TwoBoxesResult& result) {
  Artifacts a;
  std::string chain = "mu,error\n";
  chain += csv_row({result.chain.links.empty() ? 0.0 : result.chain.links.front().from_mu, 0.0});
  for (std::size_t i = 0; i < result.chain.links.size(); ++i)
    chain += csv_row({result.chain.links[i].to_mu, result.chain.errors[i + 1]});
  std::string traces = "link,step,sigma_T,step_size\n";
  for (std::size_t i = 0; i < result.chain.links.size(); ++i)
    for (const auto& row : result.chain.links[i].descent.trace)
      traces += csv_row({double(i), double(row.step), row.sigma, row.step_size});
  a.files = {{"chain_errors.csv", chain},
             {"chain_traces.csv", traces},
             {"direct_trace.csv", trace_csv(result.direct.links.front().descent.trace)}};
  a.summary = {{"chain_error", result.chain_error},
               {"direct_error", result.direct_error},
               {"direct_initial_error", result.direct_initial_error},
               {"chain_too_coarse", result.chain.too_coarse ? 1.0 : 0.0}};
  return a;
}

WidthsResult run_widths(const ExperimentConfig& config) {
  config.validate();
  WidthsResult result;
  const auto m = build_snapshot_matrix(config.width_params, config.width_space_cells, config.width_time_cells);
  result.rows = width_decay(m, config.width_n_max);
  result.l1_fit = fit_loglog(result.rows, config.width_fit_lo, config.width_fit_hi, &WidthRow::width_l1_worst);
  result.l2_fit = fit_loglog(result.rows, config.width_fit_lo, config.width_fit_hi, &WidthRow::width_l2);
  result.baseline_fit = fit_loglog(result.rows, config.width_fit_lo, config.width_fit_hi, &WidthRow::baseline_pwc);

  const int coarse_params = (config.width_params + 1) / 2;
  if (coarse_params > config.width_n_max && config.width_space_cells >= 2 && config.width_time_cells >= 2) {
    const auto coarse = build_snapshot_matrix(coarse_params, config.width_space_cells / 2, config.width_time_cells / 2);
    const auto rows = width_decay(coarse, config.width_n_max);
    result.l1_slope_half_resolution =
        fit_loglog(rows, config.width_fit_lo, config.width_fit_hi, &WidthRow::width_l1_worst).slope;
  } else {
    result.l1_slope_half_resolution = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

Artifacts widths_artifacts(const WidthsResult& result) {
  Artifacts a;
  std::string table = "n,width_l2,width_l1_worst,baseline_pwc\n";
  for (const auto& r : result.rows) table += csv_row({double(r.n), r.width_l2, r.width_l1_worst, r.baseline_pwc});
  a.files = {{"widths.csv", table}};
  a.summary = {{"slope_l1_worst", result.l1_fit.slope},
               {"slope_l2", result.l2_fit.slope},
               {"slope_baseline_pwc", result.baseline_fit.slope},
               {"slope_l1_worst_half_resolution", result.l1_slope_half_resolution}};
  return a;
}

Artifacts run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "gaussian1d") return gaussian1d_artifacts(run_gaussian1d(config));
  if (config.experiment == "burgers2d") return burgers2d_artifacts(run_burgers2d(config));
  if (config.experiment == "image-align") return image_artifacts(run_image_alignment(config));
  if (config.experiment == "two-boxes") return two_boxes_artifacts(run_two_boxes(config));
  if (config.experiment == "widths") return widths_artifacts(run_widths(config));
  throw ConfigError("experiment: unknown id '" + config.experiment + "'");
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const Artifacts& artifacts,
               double elapsed_seconds) {
  std::vector<std::pair<std::string, std::string>> files = artifacts.files;
  std::string summary = "key,value\n";
  for (const auto& [k, v] : artifacts.summary) summary += k + "," + format_number(v) + "\n";
  files.emplace_back("summary.csv", summary);

  std::string manifest = "# config\n" + serialize_config(config) + "# artifacts: fnv1a64 bytes name\n";
  for (const auto& [name, content] : files) {
    write_text(dir / name, content);
    manifest += hex64(fnv1a(content)) + " " + std::to_string(content.size()) + " " + name + "\n";
  }
  if (!config.reproducible) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest += "# run\ncreated " + std::string(stamp) + "\nelapsed_seconds " + format_number(elapsed_seconds) + "\n";
  }
  write_text(dir / "manifest.txt", manifest);
}

}  // namespace tsi
