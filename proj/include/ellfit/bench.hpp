#ifndef ELLFIT_BENCH_HPP_
#define ELLFIT_BENCH_HPP_

// Monte-Carlo sweeps over noise level or outlier count, reporting the mean
// absolute deviation of the recovered parameters per estimator.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ellfit/datagen.hpp"
#include "ellfit/io.hpp"
#include "ellfit/solver.hpp"

namespace ellfit {

enum class SweepKind { LaplacianLevel, UniformLevel, OutlierCount };

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);

struct Sweep {
  SweepKind kind = SweepKind::LaplacianLevel;
  /// Noise levels for the level sweeps, outlier counts for OutlierCount.
  std::vector<double> values;
  /// Contaminated points per trial in the level sweeps.
  long count = 20;
  /// Fixed noise level in the count sweep (uniform noise).
  double level = 1.5;
};

struct ExperimentConfig {
  Ellipse truth{0.0, 0.0, 2.0, 1.0, 0.5235987755982988};
  long n_points = 100;
  long trials_per_cell = 100;
  Sweep sweep;
  std::vector<Norm> estimators{Norm::L0, Norm::L1, Norm::L2};
  SolverConfig solver;
  std::uint64_t base_seed = 0;
  double jitter_variance = 1e-8;
  NoiseConvention convention = NoiseConvention::Std;
  /// Worker threads for the trials of a cell; output does not depend on it.
  unsigned threads = 1;
};

/// Throws std::invalid_argument on an empty/unsorted sweep or no trials.
void validate(const ExperimentConfig& cfg);

struct MadRow {
  double cell = 0.0;
  Norm estimator = Norm::L0;
  double mad_a = 0.0;
  double mad_b = 0.0;
  double mad_cx = 0.0;
  double mad_cy = 0.0;
  double mad_theta = 0.0;  // radians
  long failures = 0;
  long trials = 0;
};

/// Seed of the dataset drawn for trial m of a cell. Every estimator sees the
/// same datasets.
std::uint64_t dataset_seed(std::uint64_t base_seed, double cell, long m);
/// Seed of the solver's initial state for one (cell, estimator, trial).
std::uint64_t solver_seed(std::uint64_t base_seed, double cell,
                          Norm estimator, long m);

Dataset trial_dataset(const ExperimentConfig& cfg, double cell, long m);

/// Sees every finished trial; calls are serialized even when trials run on
/// several threads.
using TrialObserver =
    std::function<void(double cell, Norm estimator, long m, const FitReport&)>;

MadRow run_cell(const ExperimentConfig& cfg, double cell, Norm estimator,
                const TrialObserver& observe = {});

/// Rows sorted by (cell, estimator).
std::vector<MadRow> run_experiment(const ExperimentConfig& cfg,
                                   const TrialObserver& observe = {});

void write_mad_csv(std::ostream& out, const std::vector<MadRow>& rows);

/// exp1, exp2 or exp3; throws std::invalid_argument otherwise.
ExperimentConfig preset(std::string_view name);

ExperimentConfig experiment_from_json(const Json& j);
Json experiment_to_json(const ExperimentConfig& cfg);

SolverConfig solver_from_json(const Json& j, SolverConfig base = {});
Json solver_to_json(const SolverConfig& cfg);

}  // namespace ellfit

#endif  // ELLFIT_BENCH_HPP_
