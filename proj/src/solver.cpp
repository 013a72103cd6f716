#include "ellfit/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ellfit {

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::L0: return "l0";
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
  }
  return "?";
}

Norm parse_norm(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "l0") return Norm::L0;
  if (lower == "l1") return Norm::L1;
  if (lower == "l2") return Norm::L2;
  throw std::invalid_argument("unknown norm '" + std::string(text) +
                              "' (expected l0, l1 or l2)");
}

ThresholdConfig threshold_for(Norm norm) {
  switch (norm) {
    case Norm::L0: return ThresholdConfig::L0();
    case Norm::L1: return ThresholdConfig::L1();
    case Norm::L2: return ThresholdConfig::L2();
  }
  return ThresholdConfig::L1();
}

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxItersExceeded: return "max_iters_exceeded";
    case FitStatus::Diverged: return "diverged";
    case FitStatus::NotAnEllipse: return "not_an_ellipse";
  }
  return "?";
}

double Residuals::max() const { return std::max({coupling, norm, disc}); }

Network::Network(const Points2d& points, const SolverConfig& cfg,
                 const ThresholdConfig& thr)
    : design(build_design(points)), config(cfg), threshold(thr) {}

NetworkState init_state(const Network& net, std::mt19937_64& rng) {
  const auto& X = net.design;
  const Eigen::Index n = X.cols();
  // Rows 3 and 4 of the design matrix are the raw coordinates.
  const Eigen::Vector2d lo(X.row(3).minCoeff(), X.row(4).minCoeff());
  const Eigen::Vector2d hi(X.row(3).maxCoeff(), X.row(4).maxCoeff());
  const Eigen::Vector2d mid = (lo + hi) / 2;
  double diag = (hi - lo).norm();
  if (!(diag > 0)) diag = 1.0;

  std::uniform_real_distribution<double> radius_factor(0.1, 1.0);
  const double r = radius_factor(rng) * diag / 10;
  const Ellipse circle{mid.x(), mid.y(), r, r, 0.0};

  NetworkState s;
  s.alpha.head<6>() = algebraic_from_geometric(circle);
  s.alpha(6) = std::sqrt(
      std::max(net.config.epsilon - discriminant(s.alpha), 0.0));
  s.u = X.transpose() * s.alpha;
  s.z = threshold_vector(s.u, net.threshold);

  std::uniform_real_distribution<double> small(-0.01, 0.01);
  s.zeta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.zeta(i) = small(rng);
  s.beta = small(rng);
  s.gamma = small(rng);
  return s;
}

void derivatives(const Network& net, const NetworkState& s,
                 StateDerivatives& d) {
  const auto& X = net.design;
  const auto& cfg = net.config;
  const auto& Phi = net.matrices.phi;
  const auto& Theta = net.matrices.theta;

  const Eigen::Index n = X.cols();
  d.du.resize(n);
  d.dzeta.resize(n);

  // One pass over the points: coupling residual z_i - x~_i^T a~ (which is
  // also dzeta_i), du_i, and the accumulation of X~ (zeta + c0 * coupling).
  const bool exact_l2 = net.threshold.identity;
  Vector7d pull = Vector7d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = X.col(i);
    const double coupling = s.z(i) - x.dot(s.alpha);
    d.dzeta(i) = coupling;
    // For l2 the exact gradient z of (1/2)||z||^2 replaces the LCA
    // surrogate u - z.
    const double penalty = exact_l2 ? s.z(i) : s.u(i) - s.z(i);
    d.du(i) = -penalty - s.zeta(i) - cfg.c0 * coupling;
    pull += (s.zeta(i) + cfg.c0 * coupling) * x;
  }

  const Vector7d phi_a = Phi * s.alpha;
  const Vector7d theta_a = Theta * s.alpha;
  d.dbeta = s.alpha.dot(phi_a) - 1;
  d.dgamma = s.alpha.dot(theta_a) - cfg.epsilon;

  d.dalpha = pull;
  d.dalpha -= 2 * (s.beta + cfg.c1 * d.dbeta) * phi_a;
  d.dalpha -= 2 * (s.gamma + cfg.c2 * d.dgamma) * theta_a;
}

StateDerivatives derivatives(const Network& net, const NetworkState& state) {
  StateDerivatives d;
  derivatives(net, state, d);
  return d;
}

Residuals residuals(const Network& net, const NetworkState& s) {
  Residuals r;
  r.coupling = (s.z - net.design.transpose() * s.alpha).lpNorm<Eigen::Infinity>();
  r.norm = std::abs(s.alpha.dot(net.matrices.phi * s.alpha) - 1);
  r.disc = std::abs(s.alpha.dot(net.matrices.theta * s.alpha) -
                    net.config.epsilon);
  return r;
}

void advance(const Network& net, const StateDerivatives& d, NetworkState& s,
             long iteration) {
  const double mu = net.config.mu;
  const ThresholdConfig& thr = net.threshold;
  bool finite = true;
  for (Eigen::Index i = 0; i < s.u.size(); ++i) {
    s.u(i) += mu * d.du(i);
    s.zeta(i) += mu * d.dzeta(i);
    s.z(i) = general_threshold(s.u(i), thr);
    finite = finite && std::isfinite(s.u(i)) && std::isfinite(s.zeta(i));
  }
  s.alpha += mu * d.dalpha;
  s.beta += mu * d.dbeta;
  s.gamma += mu * d.dgamma;

  finite = finite && s.alpha.allFinite() && std::isfinite(s.beta) &&
           std::isfinite(s.gamma);
  if (!finite || s.alpha.lpNorm<Eigen::Infinity>() > 1e6)
    throw Diverged(iteration);
}

NetworkState step(const Network& net, const NetworkState& state) {
  NetworkState next = state;
  advance(net, derivatives(net, state), next);
  return next;
}

namespace {

ThresholdConfig effective_threshold(Norm norm, const SolverConfig& cfg) {
  if (norm == Norm::L2 || !cfg.threshold) return threshold_for(norm);
  return *cfg.threshold;
}

void finish(FitReport& report, const NetworkState& state) {
  report.alpha = state.alpha;
  report.state = state;
  try {
    report.ellipse = geometric_from_algebraic(state.alpha);
  } catch (const Error& e) {
    report.ellipse.reset();
    if (report.status == FitStatus::Converged) {
      report.status = FitStatus::NotAnEllipse;
      report.message = e.what();
    }
  }
}

}  // namespace

FitReport solve(const Points2d& points, Norm norm, const SolverConfig& cfg) {
  const Network net(points, cfg, effective_threshold(norm, cfg));
  std::mt19937_64 rng(cfg.rng_seed);
  NetworkState state = init_state(net, rng);

  FitReport report;
  StateDerivatives d;
  long it = 0;
  try {
    for (;; ++it) {
      derivatives(net, state, d);
      Residuals r{d.dzeta.lpNorm<Eigen::Infinity>(), std::abs(d.dbeta),
                  std::abs(d.dgamma)};
      if (cfg.trace_every > 0 && it % cfg.trace_every == 0)
        report.trace.push_back({it, state.alpha, r});
      report.residuals = r;
      const double motion = cfg.mu * d.dalpha.lpNorm<Eigen::Infinity>();
      if (r.max() <= cfg.tol_residual && motion <= cfg.tol_state &&
          discriminant(state.alpha) < 0) {
        report.status = FitStatus::Converged;
        break;
      }
      if (it >= cfg.max_iters) {
        report.status = FitStatus::MaxItersExceeded;
        report.message = "no equilibrium within " +
                         std::to_string(cfg.max_iters) + " iterations";
        break;
      }
      advance(net, d, state, it);
    }
  } catch (const Diverged& e) {
    report.status = FitStatus::Diverged;
    report.message = e.what();
    report.residuals = residuals(net, state);
  }
  report.iterations = it;
  finish(report, state);
  return report;
}

Eigen::MatrixXd constraint_gradients(const Network& net,
                                     const NetworkState& s) {
  const auto& X = net.design;
  const Eigen::Index n = X.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 7, n + 2);
  g.col(0).head<7>() = 2 * net.matrices.phi * s.alpha;
  g.col(1).head<7>() = 2 * net.matrices.theta * s.alpha;
  for (Eigen::Index i = 0; i < n; ++i) {
    g.col(i + 2).head<7>() = -X.col(i);
    g(7 + i, i + 2) = threshold_slope(s.u(i), net.threshold);
  }
  return g;
}

LicqResult licq_check(const Network& net, const NetworkState& state) {
  LicqResult out;
  out.gradients = constraint_gradients(net, state);
  // Row equilibration leaves the rank unchanged and keeps tiny but nonzero
  // threshold slopes (e.g. ~1e-300 deep in an l0 dead zone) from being
  // mistaken for zeros by the singular-value cutoff.
  Eigen::MatrixXd scaled = out.gradients;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    const double m = scaled.row(r).lpNorm<Eigen::Infinity>();
    if (m > 0) scaled.row(r) /= m;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-8 * sv(0) : 0.0;
  out.rank = (sv.array() > cutoff).count();
  out.independent = out.rank == out.gradients.cols();
  return out;
}

}  // namespace ellfit
