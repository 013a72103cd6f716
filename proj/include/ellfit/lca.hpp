#ifndef ELLFIT_LCA_HPP_
#define ELLFIT_LCA_HPP_

// Threshold functions of the locally competitive algorithm. They map an
// internal state u to the neuron output z = T(u) so that u - z stands in for
// the (sub)gradient of the sparsity penalty.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace ellfit {

/// Parameters of the general threshold T_(eta, delta, lambda). An infinite
/// eta selects the exact piecewise limit; `identity` disables thresholding.
struct ThresholdConfig {
  double eta = std::numeric_limits<double>::infinity();
  double delta = 1.0;
  double lambda = 1.0;
  bool identity = false;

  bool infinite() const { return std::isinf(eta); }

  static ThresholdConfig L1() { return {}; }
  static ThresholdConfig L0() { return {10000.0, 0.0, 1.0, false}; }
  static ThresholdConfig L2() { return {0.0, 0.0, 0.0, true}; }
};

namespace detail {
inline constexpr double kExpClamp = 700.0;

template <typename Scalar>
Scalar clamped_exp(Scalar x) {
  using std::exp;
  // Deep inside or far outside the dead zone the argument saturates; reuse
  // the cached endpoint values.
  static const Scalar hi = exp(Scalar(kExpClamp));
  static const Scalar lo = exp(Scalar(-kExpClamp));
  if (x >= Scalar(kExpClamp)) return hi;
  if (x <= Scalar(-kExpClamp)) return lo;
  return exp(x);
}

template <typename Scalar>
Scalar sign(Scalar u) {
  return Scalar((u > 0) - (u < 0));
}
}  // namespace detail

/// T_lambda(u): zero on |u| <= lambda, shrinks toward zero by lambda outside.
template <typename Scalar>
Scalar soft_threshold(Scalar u, Scalar lambda) {
  using std::abs;
  if (abs(u) <= lambda) return Scalar(0);
  return u - lambda * detail::sign(u);
}

template <typename Scalar>
Scalar general_threshold(Scalar u, const ThresholdConfig& cfg) {
  using std::abs;
  if (cfg.identity) return u;
  const Scalar lambda(cfg.lambda), delta(cfg.delta);
  const Scalar mag = abs(u);
  if (cfg.infinite()) {
    // The dead zone is closed: |u| == lambda maps to 0.
    if (mag <= lambda) return Scalar(0);
    return detail::sign(u) * (mag - delta * lambda);
  }
  const Scalar e = detail::clamped_exp(-Scalar(cfg.eta) * (mag - lambda));
  return detail::sign(u) * (mag - delta * lambda) / (Scalar(1) + e);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> threshold_vector(
    const Eigen::MatrixBase<Derived>& u, const ThresholdConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  return u.unaryExpr(
      [&cfg](Scalar v) { return general_threshold(v, cfg); });
}

/// dz/du. For infinite eta this is the piecewise derivative (0 inside the
/// dead zone, 1 outside).
template <typename Scalar>
Scalar threshold_slope(Scalar u, const ThresholdConfig& cfg) {
  using std::abs;
  if (cfg.identity) return Scalar(1);
  const Scalar lambda(cfg.lambda), delta(cfg.delta), eta(cfg.eta);
  const Scalar mag = abs(u);
  if (cfg.infinite()) return mag <= lambda ? Scalar(0) : Scalar(1);
  const Scalar e = detail::clamped_exp(-eta * (mag - lambda));
  const Scalar den = Scalar(1) + e;
  return Scalar(1) / den + eta * (mag - delta * lambda) * (e / den) / den;
}

}  // namespace ellfit

#endif  // ELLFIT_LCA_HPP_
