#include "tsi/models.hpp"

#include <cmath>
#include <stdexcept>

namespace tsi {

namespace {

double cutoff_argument(double x, double mu) { return x / (0.4 + mu) - 1.0; }

}  // namespace

double mollifier_cutoff(double x, double mu) {
  const double s = cutoff_argument(x, mu);
  if (s < -1.0 || s >= -0.5) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double gaussian_cutoff(double x, double mu) {
  const double s = cutoff_argument(x, mu);
  if (s < -1.0 || s >= -0.5) return 0.0;
  return 0.4 * std::exp(-7.0 * s * s);
}

double gaussian_profile(double x, double mu) {
  const double s = cutoff_argument(x, mu);
  return s >= -0.5 ? 0.0 : 0.4 * std::exp(-7.0 * s * s);
}

double cutoff_jump(double mu) { return 0.2 + 0.5 * mu; }

double burgers1d_backward_char(double x, double t, double mu) {
  return x <= 0.5 * mu * t ? x - mu * t : x;
}

double burgers1d_forward_char(double y, double t, double mu) {
  if (y <= -0.5 * mu * t) return y + mu * t;
  if (y < 0.5 * mu * t) return 0.5 * mu * t;
  return y;
}

double burgers1d_initial(double x, double mu) { return x <= 0.0 ? mu : 0.0; }

double burgers1d_solution(double x, double t, double mu) {
  return x <= 0.5 * mu * t ? mu : 0.0;
}

double burgers1d_char_transform(double x, double t, double mu, double eta) {
  if (mu < eta) throw std::domain_error("characteristic transform requires mu >= eta");
  return x <= 0.5 * mu * t ? x - (mu - eta) * t : x;
}

double burgers1d_shift_transform(double x, double t, double mu, double eta) {
  return x - 0.5 * (mu - eta) * t;
}

double burgers2d_exact(double x, double y, double t) {
  if (!(t > 0.0)) throw std::domain_error("burgers2d_exact requires t > 0");
  // Boundaries x == b_k fall into the left branch (first match in order).
  if (x <= 0.5 - 3.0 * t / 5.0) return y > 0.5 + 3.0 * t / 20.0 ? -0.2 : 0.5;
  if (x <= 0.5 - t / 4.0) return y > -8.0 * x / 7.0 + 15.0 / 14.0 - 15.0 * t / 28.0 ? -1.0 : 0.5;
  if (x <= 0.5 + t / 2.0) return y > x / 6.0 + 5.0 / 12.0 - 5.0 * t / 24.0 ? -1.0 : 0.5;
  if (x <= 0.5 + 4.0 * t / 5.0) {
    const double r = x + t - 0.5;
    return y > x - 5.0 / (18.0 * t) * r * r ? -1.0 : (2.0 * x - 1.0) / (2.0 * t);
  }
  return y > 0.5 - t / 10.0 ? -1.0 : 0.8;
}

double two_boxes(double x, double mu) {
  return ((x >= mu && x < mu + 1.0) || (x >= mu + 4.0 && x < mu + 5.0)) ? 1.0 : 0.0;
}

ParametricModel make_model(const std::string& id) {
  ParametricModel m;
  m.id = id;
  if (id == "mollifier1d" || id == "gaussian1d") {
    m.mu_min = 0.5;
    m.mu_max = 1.2;
    m.domain = Domaind::interval(0.0, 2.0);
    if (id == "mollifier1d")
      m.evaluate = [](const Pointd& p, double mu) { return mollifier_cutoff(p[0], mu); };
    else {
      m.evaluate = [](const Pointd& p, double mu) { return gaussian_cutoff(p[0], mu); };
      m.extension = [](const Pointd& p, double mu) { return gaussian_profile(p[0], mu); };
    }
    m.jump_location = cutoff_jump;
  } else if (id == "burgers1d") {
    // Snapshot in x at t = 1; the parameter is the left state.
    m.mu_min = 0.5;
    m.mu_max = 1.5;
    m.domain = Domaind::interval(-1.0, 2.0);
    m.evaluate = [](const Pointd& p, double mu) { return burgers1d_solution(p[0], 1.0, mu); };
    m.jump_location = [](double mu) { return 0.5 * mu; };
  } else if (id == "burgers2d") {
    // The parameter is time.
    m.mu_min = 0.3;
    m.mu_max = 0.5;
    m.domain = Domaind::rectangle(0.0, 1.0, 0.0, 1.0);
    m.evaluate = [](const Pointd& p, double t) { return burgers2d_exact(p[0], p[1], t); };
  } else if (id == "two_boxes") {
    m.mu_min = 0.0;
    m.mu_max = 4.0;
    m.domain = Domaind::interval(-1.0, 10.0);
    m.evaluate = [](const Pointd& p, double mu) { return two_boxes(p[0], mu); };
    m.jump_location = [](double mu) { return mu; };
  } else {
    throw std::invalid_argument("unknown model id '" + id + "'");
  }
  return m;
}

std::vector<std::string> model_ids() {
  return {"mollifier1d", "gaussian1d", "burgers1d", "burgers2d", "two_boxes"};
}

ShiftTransformd exact_shift(const ParametricModel& model, double mu, double eta) {
  if (!model.jump_location) throw std::invalid_argument("model '" + model.id + "' has no jump map");
  const auto& j = *model.jump_location;
  if (mu == eta) return ShiftTransformd(model.domain, 0.0);
  return ShiftTransformd(model.domain, j(eta) - j(mu));
}

double exact_shift_tsi(const ParametricModel& model, const LagrangeSystemd& system, double mu, const Pointd& x) {
  if (!model.jump_location) throw std::invalid_argument("model '" + model.id + "' has no jump map");
  const auto& j = *model.jump_location;
  const auto& u = model.extension ? *model.extension : model.evaluate;
  const auto weights = system.basis_values(mu);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double eta = system.node(k);
    Pointd y = x;
    y[0] += j(eta) - j(mu);
    sum += weights[k] * u(y, eta);
  }
  return sum;
}

}  // namespace tsi
