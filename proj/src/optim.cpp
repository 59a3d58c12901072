#include "tsi/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tsi {

StepDirection parse_step_direction(const std::string& name) {
  if (name == "raw") return StepDirection::raw;
  if (name == "unit_l2") return StepDirection::unit_l2;
  if (name == "unit_max") return StepDirection::unit_max;
  throw std::invalid_argument("unknown step direction '" + name + "'");
}

std::string to_string(StepDirection d) {
  switch (d) {
    case StepDirection::raw: return "raw";
    case StepDirection::unit_l2: return "unit_l2";
    case StepDirection::unit_max: return "unit_max";
  }
  return "raw";
}

void SubgradSchedule::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("schedule: alpha must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("schedule: beta must lie in (0, 1)");
  if (steps < 0) throw std::invalid_argument("schedule: step count must be nonnegative");
}

double SubgradSchedule::step_size(int k) const { return alpha * std::pow(double(k + 1), -beta); }

void TrainingProblem::validate() const {
  schedule.validate();
  if (refine < 1) throw std::invalid_argument("training problem: refinement factor must be at least 1");
  if (training.empty()) throw std::invalid_argument("training problem: empty training set");
  if (table.size() != snapshots.system.size())
    throw std::invalid_argument("training problem: transform table does not match the snapshot nodes");
  for (const auto& pair : training) {
    if (!(pair.truth.domain() == snapshots.front().domain()))
      throw std::invalid_argument("training problem: truth lives on a different domain");
    if (pair.mu < snapshots.system.lower() || pair.mu > snapshots.system.upper())
      throw std::invalid_argument("training problem: training parameter outside the parameter interval");
  }
}

namespace {

Cells refined(Cells cells, int r) { return {cells[0] * r, cells[1] * r}; }

}  // namespace

TrainingObjective::TrainingObjective(const TrainingProblem& problem) : problem_(&problem) {
  for (const auto& pair : problem.training) {
    if (problem.refine == 1)
      truths_.push_back(pair.truth);
    else
      truths_.push_back(sample(pair.truth, pair.truth.domain(), refined(pair.truth.cells(), problem.refine)));
  }
}

double TrainingObjective::sigma(const TransformTabled& table, std::size_t pair) const {
  const auto& truth = truths_[pair];
  const double s =
      l1_distance(tsi_reconstruct(problem_->snapshots, table, problem_->training[pair].mu, truth.cells()).field, truth);
  if (!std::isfinite(s)) throw NumericalError("training error is not finite");
  return s;
}

TrainingErrord TrainingObjective::evaluate(const TransformTabled& table) const {
  TrainingErrord best{-1.0, problem_->training.front().mu};
  for (std::size_t i = 0; i < truths_.size(); ++i) {
    const double s = sigma(table, i);
    const double mu = problem_->training[i].mu;
    if (s > best.value || (s == best.value && mu < best.argmax_mu)) best = {s, mu};
  }
  return best;
}

std::size_t TrainingObjective::pair_for(double mu) const {
  for (std::size_t i = 0; i < problem_->training.size(); ++i)
    if (problem_->training[i].mu == mu) return i;
  throw std::invalid_argument("no training pair at the requested parameter");
}

Coefficients<double> TrainingObjective::gradient(const TransformTabled& table, double mu) const {
  const auto& truth = truths_[pair_for(mu)];
  const auto& snaps = problem_->snapshots;
  const auto weights = snaps.system.basis_values(mu);
  const Cells cells = truth.cells();
  const auto& domain = truth.domain();

  std::vector<Transformd> phi(static_cast<std::size_t>(table.size()));
  std::vector<GridFieldd::Values> pulled(phi.size());
  GridFieldd::Values recon = GridFieldd::Values::Zero(truth.node_count());
  for (Eigen::Index k = 0; k < table.size(); ++k) {
    if (weights[k] == 0.0) continue;
    phi[k] = table.at(k, mu);
    const auto& t = phi[k];
    pulled[k] = pullback(snaps.fields[k], [&](const Pointd& p) { return tsi::apply(t, p); }, cells).values();
    recon += weights[k] * pulled[k];
  }
  const auto error_of = [&](GridFieldd::Values values) {
    const double s = l1_distance(GridFieldd(domain, cells, std::move(values)), truth);
    if (!std::isfinite(s)) throw NumericalError("fd_subgradient: non-finite objective");
    return s;
  };
  const double base = error_of(recon);

  // 1D: a coefficient only moves nodes inside its support, so the change of
  // the midpoint sum is accumulated over the touched cells alone.
  const bool local = domain.dim == 1;
  const int nx = cells[0];
  const double hx = truth.spacing(0);
  const GridFieldd::Values diff = recon - truth.values();
  const auto cell_term = [&](double a, double b) { return std::abs(0.5 * (a + b)); };

  Coefficients<double> grad = Coefficients<double>::Zero(table.free_dof());
  Eigen::Index at = 0;
  table.for_each_free([&](Eigen::Index k, Eigen::Index v, const Transformd& node) {
    const int n = dof(node);
    const double lhat = table.row(k).inner.basis_values(mu)[v];
    if (weights[k] != 0.0 && lhat != 0.0) {
      const Coefficients<double> node_c = coefficients(node);
      const Coefficients<double> phi_c = coefficients(phi[k]);
      for (int c = 0; c < n; ++c) {
        const double step = 1e-6 * std::max(1.0, std::abs(node_c[c]));
        Coefficients<double> moved = phi_c;
        moved[c] += lhat * step;
        const Transformd t = from_coefficients(phi[k], moved);
        if (!local) {
          const auto p = pullback(snaps.fields[k], [&](const Pointd& x) { return tsi::apply(t, x); }, cells).values();
          grad[at + c] = (error_of(recon + weights[k] * (p - pulled[k])) - base) / step;
          continue;
        }
        const auto support = coefficient_support(t, c);
        const int i0 = std::clamp(int(std::floor((support[0] - domain.lower[0]) / hx)) - 1, 0, nx);
        const int i1 = std::clamp(int(std::ceil((support[1] - domain.lower[0]) / hx)) + 1, 0, nx);
        std::vector<double> moved_diff(std::size_t(i1 - i0 + 1));
        for (int i = i0; i <= i1; ++i) {
          const double value = snaps.fields[k](tsi::apply(t, truth.node(i)));
          moved_diff[std::size_t(i - i0)] = diff[i] + weights[k] * (value - pulled[k][i]);
        }
        const auto d_new = [&](int i) { return i < i0 || i > i1 ? diff[i] : moved_diff[std::size_t(i - i0)]; };
        double change = 0.0;
        for (int i = std::max(i0 - 1, 0); i <= std::min(i1, nx - 1); ++i)
          change += cell_term(d_new(i), d_new(i + 1)) - cell_term(diff[i], diff[i + 1]);
        if (!std::isfinite(change)) throw NumericalError("fd_subgradient: non-finite objective");
        grad[at + c] = change * hx / step;
      }
    }
    at += n;
  });
  return grad;
}

Coefficients<double> fd_subgradient(const TrainingProblem& problem) {
  problem.validate();
  const TrainingObjective objective(problem);
  const auto err = objective.evaluate(problem.table);
  if (err.value == 0.0) return Coefficients<double>::Zero(problem.table.free_dof());
  return objective.gradient(problem.table, err.argmax_mu);
}

DescentResult subgradient_descent(const TrainingProblem& problem) {
  problem.validate();
  const TrainingObjective objective(problem);
  const auto& sched = problem.schedule;

  TransformTabled table = problem.table.with_free_coefficients(Coefficients<double>::Zero(problem.table.free_dof()));
  if (problem.project) table = problem.project(table);

  DescentResult result;
  auto err = objective.evaluate(table);
  result.table = table;
  result.best_sigma = err.value;
  result.trace.push_back({0, err.value, err.argmax_mu, 0.0});

  try {
    for (int k = 0; k < sched.steps; ++k) {
      const double h = sched.step_size(k);
      Coefficients<double> g = objective.gradient(table, err.argmax_mu);
      double scale = 1.0;
      if (sched.direction == StepDirection::unit_l2) scale = g.norm();
      if (sched.direction == StepDirection::unit_max) scale = g.cwiseAbs().maxCoeff();
      if (scale > 0.0) {
        table = table.with_free_coefficients(table.free_coefficients() - (h / scale) * g);
        if (problem.project) table = problem.project(table);
      }
      err = objective.evaluate(table);
      result.trace.push_back({k + 1, err.value, err.argmax_mu, h});
      if (err.value < result.best_sigma) {
        result.best_sigma = err.value;
        result.best_step = k + 1;
        result.table = table;
      }
    }
  } catch (const std::exception& e) {
    throw DescentAborted(std::string("subgradient descent aborted: ") + e.what(), std::move(result));
  }
  return result;
}

std::string trace_csv(std::span<const TraceRow> trace) {
  std::string out = "step,sigma_T,argmax_mu,step_size\n";
  char buf[128];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", row.step, row.sigma, row.argmax_mu, row.step_size);
    out += buf;
  }
  return out;
}

namespace {

double mono_eps(const MonotoneTransform1Dd& t) { return 1e-6 * t.domain().length(0); }

double constraint_slack(const MonotoneTransform1Dd& t) { return 1e-12 * t.domain().length(0); }

// Pool-adjacent-violators: least-squares nondecreasing fit.
Eigen::VectorXd isotonic(const Eigen::VectorXd& z) {
  std::vector<double> mean;
  std::vector<int> count;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    mean.push_back(z[i]);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const double m1 = mean.back();
      const int c1 = count.back();
      mean.pop_back();
      count.pop_back();
      mean.back() = (mean.back() * count.back() + m1 * c1) / (count.back() + c1);
      count.back() += c1;
    }
  }
  Eigen::VectorXd out(z.size());
  Eigen::Index at = 0;
  for (std::size_t b = 0; b < mean.size(); ++b)
    for (int c = 0; c < count[b]; ++c) out[at++] = mean[b];
  return out;
}

}  // namespace

bool satisfies_constraints(const MonotoneTransform1Dd& t, double bound) {
  const double eps = mono_eps(t), slack = constraint_slack(t);
  for (int k = 0; k < t.knot_count(); ++k) {
    if (std::abs(t.ordinate(k) - t.knot(k)) > bound + slack) return false;
    if (k > 0 && t.ordinate(k) - t.ordinate(k - 1) < eps - slack) return false;
  }
  return true;
}

MonotoneTransform1Dd project_constraints(const MonotoneTransform1Dd& t, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("project_constraints: bound must be positive");
  if (satisfies_constraints(t, bound)) return t;
  const int n = t.knot_count() - 1;
  const double eps = mono_eps(t);
  if (eps > t.knot_spacing()) throw std::invalid_argument("project_constraints: too many knots");
  const double a = t.domain().lower[0], b = t.domain().upper[0];
  // Shifted ordinates z_k = y_k - k eps turn the increment bound into plain
  // monotonicity; the box bounds stay nondecreasing in k.
  Eigen::VectorXd z(n + 1), lo(n + 1), hi(n + 1);
  for (int k = 0; k <= n; ++k) {
    z[k] = t.ordinate(k) - k * eps;
    lo[k] = std::max(t.knot(k) - bound - k * eps, a);
    hi[k] = std::min(t.knot(k) + bound - k * eps, b - n * eps);
  }
  lo[0] = hi[0] = a;
  lo[n] = hi[n] = b - n * eps;
  const Eigen::VectorXd p = isotonic(z).cwiseMax(lo).cwiseMin(hi);
  Coefficients<double> interior(n - 1);
  for (int k = 1; k < n; ++k) interior[k - 1] = (p[k] + k * eps) - t.knot(k);
  return t.with_coefficients(interior);
}

void ChainProblem::validate() const {
  schedule.validate();
  if (mu.empty()) throw std::invalid_argument("chain: at least the base parameter is required");
  if (mu.size() != fields.size()) throw std::invalid_argument("chain: one field per parameter required");
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (!(mu[i - 1] < mu[i])) throw std::invalid_argument("chain: parameters must be strictly increasing");
  for (const auto& f : fields) {
    if (!f.same_shape(fields.front())) throw std::invalid_argument("chain: fields differ in shape");
    if (!(f.domain() == templ.domain())) throw std::invalid_argument("chain: transform domain differs from fields");
  }
  if (!(bound > 0.0)) throw std::invalid_argument("chain: bound must be positive");
  if (refine < 1) throw std::invalid_argument("chain: refinement factor must be at least 1");
}

namespace {

ChainLink solve_link(const ChainProblem& problem, std::size_t i) {
  const double from = problem.mu[i - 1], to = problem.mu[i];
  const double bound = problem.bound;
  Eigen::VectorXd outer_nodes(1), inner_nodes(2);
  outer_nodes << from;
  inner_nodes << from, to;
  const LagrangeSystemd outer(outer_nodes, from, to), inner(inner_nodes, from, to);

  TrainingProblem link;
  link.snapshots = SnapshotSetd(outer, {problem.fields[i - 1]});
  link.table = TransformTabled::identity(outer, inner, Transformd(problem.templ.with_coefficients(
                                                           Coefficients<double>::Zero(problem.templ.dof()))));
  link.training = {TrainingPaird{to, problem.fields[i]}};
  link.schedule = problem.schedule;
  link.refine = problem.refine;
  link.project = [bound](const TransformTabled& table) {
    TransformTabled out = table;
    table.for_each_free([&](Eigen::Index k, Eigen::Index v, const Transformd& t) {
      out.set(k, v, project_constraints(std::get<MonotoneTransform1Dd>(t), bound));
    });
    return out;
  };

  ChainLink result;
  result.from_mu = from;
  result.to_mu = to;
  result.descent = subgradient_descent(link);
  result.transform = std::get<MonotoneTransform1Dd>(result.descent.table.row(0).transforms[1]);
  for (int k = 0; k < result.transform.knot_count(); ++k)
    if (std::abs(result.transform.ordinate(k) - result.transform.knot(k)) >= bound * (1.0 - 1e-9))
      result.at_bound = true;
  const double start = result.descent.trace.front().sigma;
  result.too_coarse = result.at_bound && result.descent.best_sigma > 0.01 * start;
  return result;
}

}  // namespace

ChainResult chain_optimize(const ChainProblem& problem) {
  problem.validate();
  ChainResult result;
  result.stacks.emplace_back();
  result.errors.push_back(0.0);
  for (std::size_t i = 1; i < problem.mu.size(); ++i) {
    ChainLink link = solve_link(problem, i);
    result.too_coarse = result.too_coarse || link.too_coarse;
    const auto stack =
        TransformStackd::compose(result.stacks.back(), TransformStackd(Transformd(link.transform)));
    const auto pulled = pullback(problem.fields.front(), [&](const Pointd& p) { return stack(p); });
    result.errors.push_back(l1_distance(pulled, problem.fields[i]));
    result.stacks.push_back(stack);
    result.links.push_back(std::move(link));
  }
  return result;
}

}  // namespace tsi
