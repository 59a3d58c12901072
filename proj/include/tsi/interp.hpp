#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace tsi {

/// Lagrange interpolation in a scalar parameter over a fixed node set.
/// Evaluation uses the second barycentric form.
template <typename Scalar>
class LagrangeSystem {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LagrangeSystem() = default;

  LagrangeSystem(Vector nodes, Scalar lower, Scalar upper)
      : nodes_(std::move(nodes)), lower_(lower), upper_(upper) {
    if (nodes_.size() < 1) throw std::invalid_argument("Lagrange system needs at least one node");
    if (!(lower_ <= upper_)) throw std::invalid_argument("parameter interval must satisfy lower <= upper");
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i] < lower_ || nodes_[i] > upper_)
        throw std::invalid_argument("Lagrange node outside the parameter interval");
      if (i > 0 && !(nodes_[i - 1] < nodes_[i]))
        throw std::invalid_argument("Lagrange nodes must be strictly increasing");
    }
    weights_.resize(nodes_.size());
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      Scalar w(1);
      for (Eigen::Index j = 0; j < nodes_.size(); ++j)
        if (j != i) w *= nodes_[i] - nodes_[j];
      weights_[i] = Scalar(1) / w;
    }
  }

  Eigen::Index size() const { return nodes_.size(); }
  const Vector& nodes() const { return nodes_; }
  Scalar node(Eigen::Index i) const { return nodes_[i]; }
  Scalar lower() const { return lower_; }
  Scalar upper() const { return upper_; }

  /// Index of the node equal to `mu`, or -1.
  Eigen::Index find_node(Scalar mu) const {
    for (Eigen::Index i = 0; i < size(); ++i)
      if (nodes_[i] == mu) return i;
    return -1;
  }

  /// All basis values l_i(mu). Exactly the unit vector when `mu` is a node.
  Vector basis_values(Scalar mu) const {
    Vector l = Vector::Zero(size());
    if (const auto k = find_node(mu); k >= 0) {
      l[k] = Scalar(1);
      return l;
    }
    Scalar denom(0);
    for (Eigen::Index i = 0; i < size(); ++i) {
      l[i] = weights_[i] / (mu - nodes_[i]);
      denom += l[i];
    }
    return l / denom;
  }

  Scalar basis(Eigen::Index i, Scalar mu) const {
    if (i < 0 || i >= size()) throw std::out_of_range("Lagrange basis index out of range");
    return basis_values(mu)[i];
  }

 private:
  Vector nodes_;
  Vector weights_;
  Scalar lower_{0};
  Scalar upper_{1};
};

template <typename Scalar>
LagrangeSystem<Scalar> uniform_nodes(int n, Scalar lower, Scalar upper) {
  if (n < 1) throw std::invalid_argument("uniform_nodes: n must be at least 1");
  typename LagrangeSystem<Scalar>::Vector nodes(n);
  if (n == 1) {
    nodes[0] = Scalar(0.5) * (lower + upper);
  } else {
    for (int i = 0; i < n; ++i) nodes[i] = lower + (upper - lower) * Scalar(i) / Scalar(n - 1);
    nodes[n - 1] = upper;
  }
  return {nodes, lower, upper};
}

/// Chebyshev-Gauss nodes cos((2k+1)pi/(2n)), mapped affinely and sorted.
template <typename Scalar>
LagrangeSystem<Scalar> chebyshev_nodes(int n, Scalar lower, Scalar upper) {
  if (n < 1) throw std::invalid_argument("chebyshev_nodes: n must be at least 1");
  typename LagrangeSystem<Scalar>::Vector nodes(n);
  const Scalar mid = Scalar(0.5) * (lower + upper), half = Scalar(0.5) * (upper - lower);
  for (int k = 0; k < n; ++k) {
    Scalar c = std::cos(Scalar(2 * k + 1) * std::numbers::pi_v<Scalar> / Scalar(2 * n));
    if (2 * k + 1 == n) c = Scalar(0);
    nodes[n - 1 - k] = mid + half * c;
  }
  return {nodes, lower, upper};
}

/// Sum_i l_i(mu) v_i.
template <typename Scalar, typename Derived>
Scalar interpolate_scalar(const LagrangeSystem<Scalar>& system, const Eigen::DenseBase<Derived>& values,
                          Scalar mu) {
  if (values.size() != system.size())
    throw std::invalid_argument("interpolate_scalar: one value per node required");
  const auto l = system.basis_values(mu);
  Scalar sum(0);
  for (Eigen::Index i = 0; i < l.size(); ++i) sum += l[i] * values.derived().coeff(i);
  return sum;
}

/// Max over a uniform sampling of the parameter interval of sum_i |l_i(mu)|;
/// a lower bound of the Lebesgue constant.
template <typename Scalar>
Scalar lebesgue_constant(const LagrangeSystem<Scalar>& system, int samples = 10001) {
  if (samples < 2) throw std::invalid_argument("lebesgue_constant: at least two samples required");
  Scalar best(1);
  for (int s = 0; s < samples; ++s) {
    const Scalar mu = s + 1 == samples
                          ? system.upper()
                          : system.lower() + (system.upper() - system.lower()) * Scalar(s) / Scalar(samples - 1);
    best = std::max(best, system.basis_values(mu).cwiseAbs().sum());
  }
  return best;
}

using LagrangeSystemd = LagrangeSystem<double>;

}  // namespace tsi
