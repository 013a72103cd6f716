// ellfit: fit, synthesize, benchmark and plot.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ellfit/bench.hpp"
#include "ellfit/datagen.hpp"
#include "ellfit/errors.hpp"
#include "ellfit/io.hpp"
#include "ellfit/solver.hpp"
#include "ellfit/svg.hpp"

namespace {

using namespace ellfit;

constexpr int kExitError = 1;
constexpr int kExitMaxIters = 2;
constexpr int kExitNoEllipse = 3;

struct SolverFlags {
  SolverConfig cfg;
  std::optional<double> eta;

  void attach(CLI::App* app, bool with_eta) {
    app->add_option("--c0", cfg.c0, "coupling augmentation weight")->capture_default_str();
    app->add_option("--c1", cfg.c1, "norm-constraint augmentation weight")->capture_default_str();
    app->add_option("--c2", cfg.c2, "discriminant augmentation weight")->capture_default_str();
    app->add_option("--mu", cfg.mu, "Euler step size")->capture_default_str();
    app->add_option("--epsilon", cfg.epsilon, "discriminant target (< 0)")->capture_default_str();
    if (with_eta)
      app->add_option("--eta", eta, "threshold steepness for l0/l1 (default: l0 10000, l1 exact)");
    app->add_option("--max-iters", cfg.max_iters, "iteration budget")->capture_default_str();
    app->add_option("--tol", cfg.tol_residual, "constraint residual tolerance")->capture_default_str();
    app->add_option("--tol-state", cfg.tol_state, "per-step coefficient motion tolerance")
        ->capture_default_str();
  }

  // Options the user actually set on `app`, layered over `base`.
  SolverConfig overlay(const CLI::App* app, SolverConfig base) const {
    const auto set = [&](const char* name, double& dst, double src) {
      if (app->count(name)) dst = src;
    };
    set("--c0", base.c0, cfg.c0);
    set("--c1", base.c1, cfg.c1);
    set("--c2", base.c2, cfg.c2);
    set("--mu", base.mu, cfg.mu);
    set("--epsilon", base.epsilon, cfg.epsilon);
    set("--tol", base.tol_residual, cfg.tol_residual);
    set("--tol-state", base.tol_state, cfg.tol_state);
    if (app->count("--max-iters")) base.max_iters = cfg.max_iters;
    return base;
  }

  SolverConfig resolve(Norm norm) const {
    SolverConfig out = cfg;
    if (eta && norm != Norm::L2) {
      ThresholdConfig thr = threshold_for(norm);
      thr.eta = *eta;
      out.threshold = thr;
    }
    return out;
  }
};

void validate_solver(const SolverConfig& c) {
  if (!(c.mu > 0)) throw CLI::ValidationError("--mu", "must be > 0");
  if (!(c.epsilon < 0)) throw CLI::ValidationError("--epsilon", "must be < 0");
  if (c.max_iters < 0) throw CLI::ValidationError("--max-iters", "must be >= 0");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string norm = "l1";
  std::uint64_t seed = 0;
  std::string svg;
  std::string truth;
  std::string out;
  std::string trace;
  long trace_every = 1000;
  SolverFlags solver;
};

int cmd_fit(const FitArgs& a) {
  const Norm norm = parse_norm(a.norm);
  SolverConfig cfg = a.solver.resolve(norm);
  validate_solver(cfg);
  cfg.rng_seed = a.seed;
  if (!a.trace.empty()) cfg.trace_every = a.trace_every;

  const Points2d pts = read_points_csv_file(a.input);
  std::optional<Ellipse> truth;
  if (!a.truth.empty()) truth = read_ellipse_file(a.truth);

  const FitReport report = solve(pts, norm, cfg);
  write_text(a.out, report_to_json(report).dump(2) + "\n");

  if (!a.trace.empty()) {
    std::ostringstream trace;
    write_trace_csv(trace, report);
    write_text(a.trace, trace.str());
  }
  if (!a.svg.empty()) {
    std::vector<LabeledEllipse> fits;
    if (report.ellipse) fits.push_back({std::string(to_string(norm)), *report.ellipse});
    write_text(a.svg, render_svg(pts, fits, truth));
  }

  switch (report.status) {
    case FitStatus::Converged: return 0;
    case FitStatus::MaxItersExceeded:
      std::cerr << "ellfit: " << report.message << "\n";
      return kExitMaxIters;
    case FitStatus::Diverged:
    case FitStatus::NotAnEllipse:
      std::cerr << "ellfit: " << report.message << "\n";
      return kExitNoEllipse;
  }
  return kExitError;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string preset;
  double cx = 0, cy = 0, a = 2, b = 1, theta_deg = 30;
  long n = 100;
  std::string noise = "laplacian";
  double level = 0;
  long count = 20;
  double jitter = 1e-8;
  double pepper = 0;
  std::string bbox;
  std::uint64_t seed = 0;
  std::string convention = "std";
  std::string out;
  std::string sidecar;
};

BoundingBox parse_bbox(const std::string& text, const Points2d& around) {
  const auto x = text.find_first_of("xX");
  double w = 0, h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    w = std::stod(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    h = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--bbox", "expected WxH, got '" + text + "'");
  }
  if (!(w > 0 && h > 0)) throw CLI::ValidationError("--bbox", "sides must be > 0");
  // Centered on the clean data.
  const BoundingBox data = BoundingBox::of(around);
  const double mx = data.x0 + data.width / 2, my = data.y0 + data.height / 2;
  return {mx - w / 2, my - h / 2, w, h};
}

int cmd_synth(const SynthArgs& a, const CLI::App* app) {
  DatasetSpec spec;
  SynthSpec& s = spec.synth;
  s.noise.kind = parse_noise_kind(a.noise);
  s.noise.level = a.level;
  s.noise.count = a.count;
  if (!a.preset.empty()) {
    // A preset fixes the experiment's noise model; the level defaults to the
    // top of its sweep.
    const ExperimentConfig p = preset(a.preset);
    s.truth = p.truth;
    s.n_points = p.n_points;
    if (p.sweep.kind == SweepKind::OutlierCount) {
      s.noise.kind = NoiseKind::Uniform;
      s.noise.level = p.sweep.level;
      s.noise.count = static_cast<long>(p.sweep.values.back());
    } else {
      s.noise.kind = p.sweep.kind == SweepKind::LaplacianLevel ? NoiseKind::Laplacian
                                                               : NoiseKind::Uniform;
      s.noise.level = p.sweep.values.back();
      s.noise.count = p.sweep.count;
    }
    if (app->count("--level")) s.noise.level = a.level;
    if (app->count("--count")) s.noise.count = a.count;
  }
  const auto given = [&](const char* name) { return app->count(name) > 0; };
  const bool free = a.preset.empty();
  if (free || given("--cx")) s.truth.cx = a.cx;
  if (free || given("--cy")) s.truth.cy = a.cy;
  if (free || given("--a")) s.truth.a = a.a;
  if (free || given("--b")) s.truth.b = a.b;
  if (free || given("--theta-deg")) s.truth.theta = a.theta_deg * std::numbers::pi / 180.0;
  if (free || given("--n")) s.n_points = a.n;
  s.jitter_variance = a.jitter;
  s.noise.convention = parse_noise_convention(a.convention);
  if (s.noise.kind == NoiseKind::Pepper)
    throw CLI::ValidationError("--noise", "use --pepper for pepper noise");
  if (!(s.truth.a > 0 && s.truth.b > 0))
    throw CLI::ValidationError("--a/--b", "semi-axes must be > 0");
  if (s.n_points < 1) throw CLI::ValidationError("--n", "must be >= 1");
  if (s.noise.level < 0) throw CLI::ValidationError("--level", "must be >= 0");

  Dataset data = synthesize(s, a.seed);
  if (a.pepper > 0 || !a.bbox.empty()) {
    std::mt19937_64 rng(a.seed ^ 0x9e9e9e9e9e9e9e9eULL);
    const BoundingBox box = a.bbox.empty() ? BoundingBox::of(data.points)
                                           : parse_bbox(a.bbox, sample_ellipse(s.truth, s.n_points));
    spec.pepper_density = a.pepper;
    spec.pepper_box = box;
    data = add_pepper(std::move(data), a.pepper, box, rng);
  }

  std::ostringstream csv;
  write_points_csv(csv, data.points);
  write_text(a.out, csv.str());

  std::string sidecar = a.sidecar;
  if (sidecar.empty() && !a.out.empty() && a.out != "-") sidecar = a.out + ".json";
  if (!sidecar.empty())
    write_text(sidecar, dataset_sidecar(data, spec).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string preset;
  std::string config;
  std::string out;
  long trials = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string convention = "std";
  SolverFlags solver;
};

int cmd_bench(const BenchArgs& a, const CLI::App* app) {
  ExperimentConfig cfg;
  if (!a.config.empty())
    cfg = experiment_from_json(parse_json_file(a.config));
  else
    cfg = preset(a.preset.empty() ? "exp1" : a.preset);
  if (!a.preset.empty() && !a.config.empty())
    throw CLI::ValidationError("--preset", "cannot be combined with --config");
  if (app->count("--trials")) cfg.trials_per_cell = a.trials;
  if (app->count("--threads")) cfg.threads = a.threads;
  if (app->count("--seed")) cfg.base_seed = a.seed;
  if (app->count("--noise-scale-convention"))
    cfg.convention = parse_noise_convention(a.convention);
  cfg.solver = a.solver.overlay(app, cfg.solver);
  validate_solver(cfg.solver);
  validate(cfg);

  const auto rows = run_experiment(cfg);
  std::ostringstream csv;
  write_mad_csv(csv, rows);
  write_text(a.out, csv.str());
  return 0;
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
  std::string input;
  std::vector<std::string> fits;
  std::string truth;
  std::string out;
};

int cmd_plot(const PlotArgs& a) {
  const Points2d pts = read_points_csv_file(a.input);
  std::vector<LabeledEllipse> fits;
  for (const auto& path : a.fits) {
    const Json j = parse_json_file(path);
    // Either a fit report or a bare ellipse record.
    if (j.contains("ellipse")) {
      if (j.at("ellipse").is_null()) continue;
      fits.push_back({path, ellipse_from_json(j.at("ellipse"))});
    } else {
      fits.push_back({path, ellipse_from_json(j)});
    }
  }
  std::optional<Ellipse> truth;
  if (!a.truth.empty()) truth = read_ellipse_file(a.truth);
  write_text(a.out, render_svg(pts, fits, truth));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust ellipse fitting with Lagrange-programming network dynamics"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit an ellipse to a point-set CSV");
  fit_cmd->add_option("input", fit.input, "point-set CSV")->required();
  fit_cmd->add_option("--norm", fit.norm, "fitting norm")
      ->check(CLI::IsMember({"l0", "l1", "l2"}, CLI::ignore_case))
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "seed of the initial state")->capture_default_str();
  fit_cmd->add_option("--svg", fit.svg, "write an SVG overlay here");
  fit_cmd->add_option("--truth", fit.truth, "ellipse JSON (or dataset sidecar) drawn dashed");
  fit_cmd->add_option("-o,--out", fit.out, "report JSON path (default: stdout)");
  fit_cmd->add_option("--trace", fit.trace, "write a trace CSV here");
  fit_cmd->add_option("--trace-every", fit.trace_every, "trace sampling interval")
      ->capture_default_str();
  fit.solver.attach(fit_cmd, true);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic point set");
  synth_cmd->add_option("--preset", synth.preset, "exp1, exp2 or exp3 noise model")
      ->check(CLI::IsMember({"exp1", "exp2", "exp3"}));
  synth_cmd->add_option("--cx", synth.cx)->capture_default_str();
  synth_cmd->add_option("--cy", synth.cy)->capture_default_str();
  synth_cmd->add_option("--a", synth.a, "semi-major axis")->capture_default_str();
  synth_cmd->add_option("--b", synth.b, "semi-minor axis")->capture_default_str();
  synth_cmd->add_option("--theta-deg", synth.theta_deg, "orientation in degrees")
      ->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "boundary points")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "outlier noise kind")
      ->check(CLI::IsMember({"laplacian", "uniform"}))
      ->capture_default_str();
  synth_cmd->add_option("--level", synth.level, "outlier noise level")->capture_default_str();
  synth_cmd->add_option("--count", synth.count, "contaminated points")->capture_default_str();
  synth_cmd->add_option("--jitter", synth.jitter, "Gaussian jitter variance")
      ->capture_default_str();
  synth_cmd->add_option("--pepper", synth.pepper, "pepper density per unit area")
      ->capture_default_str();
  synth_cmd->add_option("--bbox", synth.bbox, "pepper box WxH, centered on the ellipse");
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--noise-scale-convention", synth.convention,
                        "read --level as std or native scale")
      ->check(CLI::IsMember({"std", "scale"}))
      ->capture_default_str();
  synth_cmd->add_option("-o,--out", synth.out, "CSV path (default: stdout)");
  synth_cmd->add_option("--sidecar", synth.sidecar, "sidecar JSON path (default: OUT.json)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "run a Monte-Carlo sweep");
  bench_cmd->add_option("--preset", bench.preset, "exp1, exp2 or exp3")
      ->check(CLI::IsMember({"exp1", "exp2", "exp3"}));
  bench_cmd->add_option("--config", bench.config, "experiment config JSON");
  bench_cmd->add_option("-o,--out", bench.out, "CSV path (default: stdout)");
  bench_cmd->add_option("--trials", bench.trials, "trials per cell")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--noise-scale-convention", bench.convention)
      ->check(CLI::IsMember({"std", "scale"}));
  // Per-estimator thresholds are set through solver.threshold in --config.
  bench.solver.attach(bench_cmd, false);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "draw points and fitted ellipses as SVG");
  plot_cmd->add_option("input", plot.input, "point-set CSV")->required();
  plot_cmd->add_option("--fit", plot.fits, "fit report or ellipse JSON (repeatable)");
  plot_cmd->add_option("--truth", plot.truth, "ellipse JSON drawn dashed");
  plot_cmd->add_option("-o,--out", plot.out, "SVG path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*synth_cmd) return cmd_synth(synth, synth_cmd);
    if (*bench_cmd) return cmd_bench(bench, bench_cmd);
    if (*plot_cmd) return cmd_plot(plot);
  } catch (const CLI::Error& e) {
    std::cerr << "ellfit: " << e.get_name() << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "ellfit: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
