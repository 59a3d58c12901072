#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsi/reconstruct.hpp"

namespace tsi {

/// How the subgradient element is scaled before the step.
enum class StepDirection {
  raw,             // c -= h * g
  unit_l2,         // c -= h * g / |g|_2
  unit_max,        // c -= h * g / |g|_inf
};

StepDirection parse_step_direction(const std::string& name);
std::string to_string(StepDirection d);

/// Decaying fixed step rule h_k = alpha (k + 1)^(-beta).
struct SubgradSchedule {
  double alpha = 1e-3;
  double beta = 0.1;
  int steps = 500;
  StepDirection direction = StepDirection::unit_max;

  void validate() const;
  double step_size(int k) const;
};

struct TrainingProblem {
  SnapshotSetd snapshots;
  TransformTabled table;
  std::vector<TrainingPaird> training;
  SubgradSchedule schedule;
  // Applied to the table after every update (feasibility projection).
  std::function<TransformTabled(const TransformTabled&)> project;
  // Errors are taken on the truth grid refined by this factor per axis.
  // Values > 1 keep the objective sensitive under strongly stretching maps.
  int refine = 1;

  void validate() const;
};

/// Training error with cached per-node pullbacks, so that a finite-difference
/// component re-samples only the one snapshot it perturbs.
class TrainingObjective {
 public:
  explicit TrainingObjective(const TrainingProblem& problem);

  TrainingErrord evaluate(const TransformTabled& table) const;

  /// Forward-difference gradient of sigma_mu for the training pair whose
  /// parameter is `mu`; step 1e-6 max(1, |c|) per component.
  Coefficients<double> gradient(const TransformTabled& table, double mu) const;

 private:
  std::size_t pair_for(double mu) const;
  double sigma(const TransformTabled& table, std::size_t pair) const;

  const TrainingProblem* problem_;
  std::vector<GridFieldd> truths_;  // on the refined grid
};

/// The forward-difference element of the subdifferential at the current
/// table coefficients, taken on the active (argmax) training term.
Coefficients<double> fd_subgradient(const TrainingProblem& problem);

struct TraceRow {
  int step = 0;
  double sigma = 0.0;
  double argmax_mu = 0.0;
  double step_size = 0.0;
};

struct DescentResult {
  TransformTabled table;  // best iterate by training error
  std::vector<TraceRow> trace;
  double best_sigma = 0.0;
  int best_step = 0;
};

/// Thrown when the objective fails mid-run; carries the partial result.
class DescentAborted : public NumericalError {
 public:
  DescentAborted(const std::string& what, DescentResult partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const DescentResult& partial() const { return partial_; }

 private:
  DescentResult partial_;
};

/// Subgradient descent from identity transforms. Row 0 of the trace is the
/// starting point (step size 0); row k is the error after update k.
DescentResult subgradient_descent(const TrainingProblem& problem);

/// `step,sigma_T,argmax_mu,step_size` with a header line.
std::string trace_csv(std::span<const TraceRow> trace);

/// Euclidean projection of the ordinates onto
///   { y : y_0 = a, y_n = b, y_{k+1} - y_k >= eps, |y_k - x_k| <= bound },
/// eps = 1e-6 |domain|. Exact for uniform knots (isotonic regression
/// followed by a clamp to monotone bounds).
MonotoneTransform1Dd project_constraints(const MonotoneTransform1Dd& transform, double bound);

/// True when every ordinate respects the bound and increments are >= eps.
bool satisfies_constraints(const MonotoneTransform1Dd& transform, double bound);

struct ChainLink {
  double from_mu = 0.0;
  double to_mu = 0.0;
  MonotoneTransform1Dd transform;  // u(., to) ~ u(transform(.), from)
  DescentResult descent;
  bool at_bound = false;           // some ordinate ended on the box bound
  // at_bound while the error stayed above 1% of its identity value
  bool too_coarse = false;
};

struct ChainResult {
  std::vector<ChainLink> links;
  std::vector<TransformStackd> stacks;  // phi(mu_i, mu_0), i = 1..m
  std::vector<double> errors;           // |u(., mu_i) - u(phi(.), mu_0)|_1 on the grid
  bool too_coarse = false;
};

struct ChainProblem {
  std::vector<double> mu;               // mu_0 < mu_1 < ... < mu_m
  std::vector<GridFieldd> fields;       // u(., mu_i), common grid
  MonotoneTransform1Dd templ;           // knots and domain
  double bound = 0.5;
  SubgradSchedule schedule;
  int refine = 1;                       // see TrainingProblem::refine

  void validate() const;
};

/// Link-by-link projected subgradient descent, composed into stacks.
ChainResult chain_optimize(const ChainProblem& problem);

}  // namespace tsi
