#ifndef ELLFIT_SOLVER_HPP_
#define ELLFIT_SOLVER_HPP_

// Lagrange programming neural network for robust ellipse fitting. The
// network minimizes sum_i psi(z_i) subject to z = X~^T alpha~, a unit-norm
// constraint on [A..F] and B^2 - 4AC + G^2 = epsilon, with quadratic
// augmentation of all three constraints. The non-smooth penalty psi is never
// evaluated; its gradient is replaced by u - z where z = T(u).

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ellfit/conic.hpp"
#include "ellfit/lca.hpp"

namespace ellfit {

using Vector7d = Vector7<double>;
using Design = DesignMatrix<double>;

enum class Norm { L0, L1, L2 };

std::string_view to_string(Norm norm);
/// Accepts "l0"/"l1"/"l2" (case-insensitive); throws std::invalid_argument.
Norm parse_norm(std::string_view text);
ThresholdConfig threshold_for(Norm norm);

struct SolverConfig {
  double c0 = 5.0;
  double c1 = 10.0;
  double c2 = 10.0;
  double mu = 1e-4;
  double epsilon = -1e-12;
  long max_iters = 2000000;
  double tol_residual = 1e-6;
  double tol_state = 1e-9;
  /// Overrides the norm's preset threshold (ignored for L2).
  std::optional<ThresholdConfig> threshold;
  std::uint64_t rng_seed = 0;
  /// Record a trace sample every this many iterations; 0 disables.
  long trace_every = 0;
};

/// All neuron values at one instant. z is derived from u and is refreshed by
/// every operation that changes u.
struct NetworkState {
  Eigen::VectorXd u;
  Eigen::VectorXd z;
  Vector7d alpha;
  Eigen::VectorXd zeta;
  double beta = 0.0;
  double gamma = 0.0;
};

struct StateDerivatives {
  Eigen::VectorXd du;
  Vector7d dalpha;
  Eigen::VectorXd dzeta;
  double dbeta = 0.0;
  double dgamma = 0.0;
};

/// Constraint violations: ||z - X~^T a~||_inf, |a~^T Phi a~ - 1| and
/// |a~^T Theta a~ - epsilon|.
struct Residuals {
  double coupling = 0.0;
  double norm = 0.0;
  double disc = 0.0;

  double max() const;
};

/// Everything the dynamics need besides the state.
struct Network {
  Network(const Points2d& points, const SolverConfig& config,
          const ThresholdConfig& threshold);

  Design design;
  SolverConfig config;
  ThresholdConfig threshold;
  ConstraintMatrices<double> matrices;
};

NetworkState init_state(const Network& net, std::mt19937_64& rng);

StateDerivatives derivatives(const Network& net, const NetworkState& state);
/// Allocation-free form used by the integration loop.
void derivatives(const Network& net, const NetworkState& state,
                 StateDerivatives& out);

Residuals residuals(const Network& net, const NetworkState& state);

/// One explicit Euler step of size config.mu. Throws Diverged on a
/// non-finite state or ||alpha~||_inf > 1e6.
NetworkState step(const Network& net, const NetworkState& state);
void advance(const Network& net, const StateDerivatives& d,
             NetworkState& state, long iteration = 0);

enum class FitStatus { Converged, MaxItersExceeded, Diverged, NotAnEllipse };

std::string_view to_string(FitStatus status);

struct TraceSample {
  long iteration = 0;
  Vector7d alpha;
  Residuals residuals;
};

struct FitReport {
  FitStatus status = FitStatus::MaxItersExceeded;
  /// Present whenever the final coefficients describe a real ellipse.
  std::optional<Ellipse> ellipse;
  Vector7d alpha = Vector7d::Zero();
  long iterations = 0;
  Residuals residuals;
  std::vector<TraceSample> trace;
  /// Final (or best-so-far) network state.
  NetworkState state;
  std::string message;

  bool converged() const { return status == FitStatus::Converged; }
};

/// Integrates the network from init_state until the constraint residuals and
/// the per-step motion of alpha~ fall below tolerance, or max_iters.
FitReport solve(const Points2d& points, Norm norm,
                const SolverConfig& config = {});

struct LicqResult {
  long rank = 0;
  bool independent = false;
  /// Constraint-gradient matrix, (N + 7) x (N + 2).
  Eigen::MatrixXd gradients;
};

Eigen::MatrixXd constraint_gradients(const Network& net,
                                     const NetworkState& state);
/// Linear independence of the N + 2 constraint gradients at `state`.
LicqResult licq_check(const Network& net, const NetworkState& state);

}  // namespace ellfit

#endif  // ELLFIT_SOLVER_HPP_
