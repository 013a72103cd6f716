#include "ellfit/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "ellfit/errors.hpp"

namespace ellfit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_hash(double cell, std::uint64_t tag, long m) {
  std::uint64_t h = splitmix64(std::bit_cast<std::uint64_t>(cell + 0.0));
  h = splitmix64(h ^ tag);
  return splitmix64(h ^ static_cast<std::uint64_t>(m));
}

constexpr std::uint64_t kDatasetTag = 0xda7a5e7ULL;

std::uint64_t estimator_tag(Norm n) {
  return 0x5eed0000ULL + static_cast<std::uint64_t>(n);
}

using Errors = std::array<double, 5>;  // a, b, cx, cy, theta

std::optional<Errors> run_trial(const ExperimentConfig& cfg, double cell,
                                Norm estimator, long m,
                                const TrialObserver& observe,
                                std::mutex& observe_mutex) {
  const Dataset data = trial_dataset(cfg, cell, m);
  SolverConfig sc = cfg.solver;
  sc.rng_seed = solver_seed(cfg.base_seed, cell, estimator, m);
  sc.trace_every = 0;
  const FitReport report = solve(data.points, estimator, sc);
  if (observe) {
    const std::lock_guard<std::mutex> lock(observe_mutex);
    observe(cell, estimator, m, report);
  }
  if (report.status == FitStatus::Diverged || !report.ellipse)
    return std::nullopt;
  const Ellipse& e = *report.ellipse;
  const Ellipse t = canonicalize(cfg.truth);
  return Errors{std::abs(e.a - t.a), std::abs(e.b - t.b),
                std::abs(e.cx - t.cx), std::abs(e.cy - t.cy),
                angle_distance(e.theta, t.theta)};
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::LaplacianLevel: return "laplacian_level";
    case SweepKind::UniformLevel: return "uniform_level";
    case SweepKind::OutlierCount: return "outlier_count";
  }
  return "?";
}

SweepKind parse_sweep_kind(std::string_view text) {
  if (text == "laplacian_level") return SweepKind::LaplacianLevel;
  if (text == "uniform_level") return SweepKind::UniformLevel;
  if (text == "outlier_count") return SweepKind::OutlierCount;
  throw std::invalid_argument("unknown sweep kind '" + std::string(text) + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials_per_cell < 1)
    throw std::invalid_argument("trials_per_cell must be >= 1");
  if (cfg.n_points < 5) throw std::invalid_argument("n_points must be >= 5");
  if (cfg.sweep.values.empty())
    throw std::invalid_argument("sweep values must be nonempty");
  if (!std::is_sorted(cfg.sweep.values.begin(), cfg.sweep.values.end()))
    throw std::invalid_argument("sweep values must be sorted");
  if (cfg.estimators.empty())
    throw std::invalid_argument("at least one estimator is required");
  for (double v : cfg.sweep.values) {
    if (!std::isfinite(v) || v < 0)
      throw std::invalid_argument("sweep values must be finite and >= 0");
    if (cfg.sweep.kind == SweepKind::OutlierCount &&
        (v != std::floor(v) || v > double(cfg.n_points)))
      throw std::invalid_argument("outlier counts must be integers <= n_points");
  }
  if (cfg.sweep.kind != SweepKind::OutlierCount &&
      (cfg.sweep.count < 0 || cfg.sweep.count > cfg.n_points))
    throw CountTooLarge(cfg.sweep.count, cfg.n_points);
}

std::uint64_t dataset_seed(std::uint64_t base_seed, double cell, long m) {
  return base_seed + cell_hash(cell, kDatasetTag, m);
}

std::uint64_t solver_seed(std::uint64_t base_seed, double cell,
                          Norm estimator, long m) {
  return base_seed + cell_hash(cell, estimator_tag(estimator), m);
}

Dataset trial_dataset(const ExperimentConfig& cfg, double cell, long m) {
  SynthSpec spec;
  spec.truth = cfg.truth;
  spec.n_points = cfg.n_points;
  spec.jitter_variance = cfg.jitter_variance;
  spec.noise.convention = cfg.convention;
  switch (cfg.sweep.kind) {
    case SweepKind::LaplacianLevel:
      spec.noise.kind = NoiseKind::Laplacian;
      spec.noise.level = cell;
      spec.noise.count = cfg.sweep.count;
      break;
    case SweepKind::UniformLevel:
      spec.noise.kind = NoiseKind::Uniform;
      spec.noise.level = cell;
      spec.noise.count = cfg.sweep.count;
      break;
    case SweepKind::OutlierCount:
      spec.noise.kind = NoiseKind::Uniform;
      spec.noise.level = cfg.sweep.level;
      spec.noise.count = static_cast<long>(cell);
      break;
  }
  return synthesize(spec, dataset_seed(cfg.base_seed, cell, m));
}

MadRow run_cell(const ExperimentConfig& cfg, double cell, Norm estimator,
                const TrialObserver& observe) {
  const long trials = cfg.trials_per_cell;
  std::mutex observe_mutex;
  std::vector<std::optional<Errors>> results(static_cast<std::size_t>(trials));

  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.threads, unsigned(trials)));
  if (workers == 1) {
    for (long m = 1; m <= trials; ++m)
      results[std::size_t(m - 1)] = run_trial(cfg, cell, estimator, m, observe, observe_mutex);
  } else {
    std::atomic<long> next{1};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (long m = next++; m <= trials; m = next++)
          results[std::size_t(m - 1)] = run_trial(cfg, cell, estimator, m, observe, observe_mutex);
      });
    for (auto& t : pool) t.join();
  }

  MadRow row;
  row.cell = cell;
  row.estimator = estimator;
  row.trials = trials;
  Errors sum{};
  long ok = 0;
  for (const auto& r : results) {
    if (!r) {
      ++row.failures;
      continue;
    }
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*r)[k];
    ++ok;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto mean = [&](std::size_t k) { return ok > 0 ? sum[k] / double(ok) : nan; };
  row.mad_a = mean(0);
  row.mad_b = mean(1);
  row.mad_cx = mean(2);
  row.mad_cy = mean(3);
  row.mad_theta = mean(4);
  return row;
}

std::vector<MadRow> run_experiment(const ExperimentConfig& cfg,
                                   const TrialObserver& observe) {
  validate(cfg);
  std::vector<Norm> estimators = cfg.estimators;
  std::sort(estimators.begin(), estimators.end());
  estimators.erase(std::unique(estimators.begin(), estimators.end()),
                   estimators.end());
  std::vector<MadRow> rows;
  for (double cell : cfg.sweep.values)
    for (Norm est : estimators) rows.push_back(run_cell(cfg, cell, est, observe));
  std::stable_sort(rows.begin(), rows.end(), [](const MadRow& x, const MadRow& y) {
    if (x.cell != y.cell) return x.cell < y.cell;
    return x.estimator < y.estimator;
  });
  return rows;
}

void write_mad_csv(std::ostream& out, const std::vector<MadRow>& rows) {
  out << "cell,estimator,mad_a,mad_b,mad_cx,mad_cy,mad_theta_deg,failures,trials\n";
  for (const auto& r : rows) {
    out << format_decimal(r.cell) << ',' << to_string(r.estimator) << ','
        << format_decimal(r.mad_a) << ',' << format_decimal(r.mad_b) << ','
        << format_decimal(r.mad_cx) << ',' << format_decimal(r.mad_cy) << ','
        << format_decimal(r.mad_theta * 180.0 / std::numbers::pi) << ','
        << r.failures << ',' << r.trials << '\n';
  }
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "exp1") {
    cfg.sweep.kind = SweepKind::LaplacianLevel;
    cfg.sweep.count = 20;
    for (int k = 0; k <= 5; ++k)
      cfg.sweep.values.push_back(std::numbers::sqrt2 * (k / 5.0));
  } else if (name == "exp2") {
    cfg.sweep.kind = SweepKind::UniformLevel;
    cfg.sweep.count = 20;
    for (int k = 0; k <= 8; ++k) cfg.sweep.values.push_back(0.3 * k);
  } else if (name == "exp3") {
    cfg.sweep.kind = SweepKind::OutlierCount;
    cfg.sweep.level = 1.5;
    for (int k = 0; k <= 40; k += 5) cfg.sweep.values.push_back(k);
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected exp1, exp2 or exp3)");
  }
  return cfg;
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> keys,
                    const char* where) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(where) + " must be a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw std::invalid_argument(std::string("unknown key '") + item.key() +
                                  "' in " + where);
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SolverConfig solver_from_json(const Json& j, SolverConfig cfg) {
  reject_unknown(j,
                 {"c0", "c1", "c2", "mu", "epsilon", "max_iters", "tol_residual",
                  "tol_state", "threshold", "rng_seed"},
                 "solver");
  read_opt(j, "c0", cfg.c0);
  read_opt(j, "c1", cfg.c1);
  read_opt(j, "c2", cfg.c2);
  read_opt(j, "mu", cfg.mu);
  read_opt(j, "epsilon", cfg.epsilon);
  read_opt(j, "max_iters", cfg.max_iters);
  read_opt(j, "tol_residual", cfg.tol_residual);
  read_opt(j, "tol_state", cfg.tol_state);
  read_opt(j, "rng_seed", cfg.rng_seed);
  if (j.contains("threshold") && !j.at("threshold").is_null()) {
    const Json& t = j.at("threshold");
    reject_unknown(t, {"eta", "delta", "lambda"}, "solver.threshold");
    ThresholdConfig thr;
    // JSON has no infinity; null or an absent eta selects the exact limit.
    if (t.contains("eta") && !t.at("eta").is_null())
      thr.eta = t.at("eta").get<double>();
    read_opt(t, "delta", thr.delta);
    read_opt(t, "lambda", thr.lambda);
    cfg.threshold = thr;
  }
  return cfg;
}

Json solver_to_json(const SolverConfig& cfg) {
  Json j{{"c0", cfg.c0},
         {"c1", cfg.c1},
         {"c2", cfg.c2},
         {"mu", cfg.mu},
         {"epsilon", cfg.epsilon},
         {"max_iters", cfg.max_iters},
         {"tol_residual", cfg.tol_residual},
         {"tol_state", cfg.tol_state}};
  if (cfg.threshold) {
    const auto& t = *cfg.threshold;
    j["threshold"] = Json{{"eta", t.infinite() ? Json(nullptr) : Json(t.eta)},
                          {"delta", t.delta},
                          {"lambda", t.lambda}};
  }
  return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
  try {
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = preset(j.at("preset").get<std::string>());
    reject_unknown(j,
                   {"preset", "truth", "n_points", "trials_per_cell", "sweep",
                    "estimators", "solver", "base_seed", "jitter_variance",
                    "noise_scale_convention", "threads"},
                   "experiment config");
    if (j.contains("truth")) cfg.truth = ellipse_from_json(j.at("truth"));
    read_opt(j, "n_points", cfg.n_points);
    read_opt(j, "trials_per_cell", cfg.trials_per_cell);
    read_opt(j, "base_seed", cfg.base_seed);
    read_opt(j, "jitter_variance", cfg.jitter_variance);
    read_opt(j, "threads", cfg.threads);
    if (j.contains("noise_scale_convention"))
      cfg.convention = parse_noise_convention(
          j.at("noise_scale_convention").get<std::string>());
    if (j.contains("sweep")) {
      const Json& s = j.at("sweep");
      reject_unknown(s, {"kind", "values", "count", "level"}, "sweep");
      if (s.contains("kind"))
        cfg.sweep.kind = parse_sweep_kind(s.at("kind").get<std::string>());
      read_opt(s, "values", cfg.sweep.values);
      read_opt(s, "count", cfg.sweep.count);
      read_opt(s, "level", cfg.sweep.level);
    }
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : j.at("estimators"))
        cfg.estimators.push_back(parse_norm(e.get<std::string>()));
    }
    if (j.contains("solver")) cfg.solver = solver_from_json(j.at("solver"), cfg.solver);
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what(), 0);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("experiment config: ") + e.what(), 0);
  }
}

Json experiment_to_json(const ExperimentConfig& cfg) {
  Json est = Json::array();
  for (Norm n : cfg.estimators) est.push_back(std::string(to_string(n)));
  Json sweep{{"kind", std::string(to_string(cfg.sweep.kind))},
             {"values", cfg.sweep.values}};
  if (cfg.sweep.kind == SweepKind::OutlierCount)
    sweep["level"] = cfg.sweep.level;
  else
    sweep["count"] = cfg.sweep.count;
  return Json{{"truth", ellipse_to_json(cfg.truth)},
              {"n_points", cfg.n_points},
              {"trials_per_cell", cfg.trials_per_cell},
              {"sweep", sweep},
              {"estimators", est},
              {"solver", solver_to_json(cfg.solver)},
              {"base_seed", cfg.base_seed},
              {"jitter_variance", cfg.jitter_variance},
              {"noise_scale_convention", std::string(to_string(cfg.convention))}};
}

}  // namespace ellfit
