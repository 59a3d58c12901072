#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsi/field.hpp"
#include "tsi/interp.hpp"
#include "tsi/transform.hpp"

namespace tsi {

// Standard mollifier cut off at s = -1/2, evaluated at x / (0.4 + mu) - 1.
double mollifier_cutoff(double x, double mu);

// 0.4 exp(-7 s^2) on -1 <= s < -1/2, s = x / (0.4 + mu) - 1.
double gaussian_cutoff(double x, double mu);

// The Gaussian piece of gaussian_cutoff without the left cut-off; equal to it
// for x >= 0.
double gaussian_profile(double x, double mu);

// Jump location shared by both cut-off models: 1/5 + mu / 2.
double cutoff_jump(double mu);

// Riemann problem for 1D Burgers with left state mu and right state 0.
double burgers1d_backward_char(double x, double t, double mu);
double burgers1d_forward_char(double y, double t, double mu);
double burgers1d_solution(double x, double t, double mu);
double burgers1d_initial(double x, double mu);

/// phi(mu, eta)(x, t) = forward_eta(backward_mu(x, t), t); valid for mu >= eta.
double burgers1d_char_transform(double x, double t, double mu, double eta);

/// Shift moving the eta-shock onto the mu-shock: x - (mu - eta) t / 2.
double burgers1d_shift_transform(double x, double t, double mu, double eta);

/// Exact solution of the 2D Burgers Riemann problem with four constant states.
double burgers2d_exact(double x, double y, double t);

/// Indicator of [mu, mu + 1) U [mu + 4, mu + 5).
double two_boxes(double x, double mu);

/// Analytic family mu -> u(., mu) on a spatial domain.
struct ParametricModel {
  std::string id;
  double mu_min = 0.0;
  double mu_max = 1.0;
  Domaind domain = Domaind::interval(0.0, 1.0);
  std::function<double(const Pointd&, double)> evaluate;
  // Location of the (leading) jump for 1D models; enables exact shifts.
  std::optional<std::function<double(double)>> jump_location;
  // Continuation of `evaluate` past the domain, for snapshots shifted by
  // exact transforms. Agrees with `evaluate` on the domain.
  std::optional<std::function<double(const Pointd&, double)>> extension;

  double operator()(const Pointd& p, double mu) const { return evaluate(p, mu); }

  /// The snapshot u(., mu) as a callable on points.
  auto at(double mu) const {
    return [this, mu](const Pointd& p) { return evaluate(p, mu); };
  }
};

/// Registry ids: mollifier1d, gaussian1d, burgers1d, burgers2d, two_boxes.
ParametricModel make_model(const std::string& id);
std::vector<std::string> model_ids();

/// x -> x - j(mu) + j(eta); requires a jump map.
ShiftTransformd exact_shift(const ParametricModel& model, double mu, double eta);

/// sum_k w_k u_ext(x + s(mu, eta_k), eta_k) with exact shifts and no clamping;
/// falls back to `evaluate` where no extension exists.
double exact_shift_tsi(const ParametricModel& model, const LagrangeSystemd& system, double mu, const Pointd& x);

}  // namespace tsi
