#include "ellfit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ellfit {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Laplacian: return "laplacian";
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Pepper: return "pepper";
  }
  return "?";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "laplacian" || text == "laplace") return NoiseKind::Laplacian;
  if (text == "uniform") return NoiseKind::Uniform;
  if (text == "pepper") return NoiseKind::Pepper;
  throw std::invalid_argument("unknown noise kind '" + std::string(text) + "'");
}

std::string_view to_string(NoiseConvention c) {
  return c == NoiseConvention::Std ? "std" : "scale";
}

NoiseConvention parse_noise_convention(std::string_view text) {
  if (text == "std") return NoiseConvention::Std;
  if (text == "scale") return NoiseConvention::Scale;
  throw std::invalid_argument("unknown noise-scale convention '" +
                              std::string(text) + "' (expected std or scale)");
}

BoundingBox BoundingBox::of(const Points2d& points) {
  if (points.cols() == 0) return {};
  const Eigen::Vector2d lo = points.rowwise().minCoeff();
  const Eigen::Vector2d hi = points.rowwise().maxCoeff();
  return {lo.x(), lo.y(), hi.x() - lo.x(), hi.y() - lo.y()};
}

Points2d sample_ellipse(const Ellipse& e, long n) {
  if (n < 1) throw std::invalid_argument("sample_ellipse needs n >= 1");
  Points2d pts(2, n);
  for (long i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * double(i) / double(n);
    pts.col(i) = ellipse_point(e, t);
  }
  return pts;
}

Points2d add_gaussian(const Points2d& points, double variance,
                      std::mt19937_64& rng) {
  if (variance < 0) throw std::invalid_argument("variance must be >= 0");
  if (variance == 0) return points;
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  Points2d out = points;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    out(0, i) += noise(rng);
    out(1, i) += noise(rng);
  }
  return out;
}

double draw_noise(NoiseKind kind, double level, NoiseConvention convention,
                  std::mt19937_64& rng) {
  switch (kind) {
    case NoiseKind::Laplacian: {
      // Difference of two unit exponentials is a unit-scale Laplacian.
      const double b =
          convention == NoiseConvention::Std ? level / std::sqrt(2.0) : level;
      std::exponential_distribution<double> unit(1.0);
      const double e1 = unit(rng);
      const double e2 = unit(rng);
      return b * (e1 - e2);
    }
    case NoiseKind::Uniform: {
      const double w =
          convention == NoiseConvention::Std ? level * std::sqrt(3.0) : level;
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      return w * unit(rng);
    }
    case NoiseKind::Pepper: break;
  }
  throw std::invalid_argument("draw_noise: pepper noise is not additive");
}

Dataset corrupt_subset(const Points2d& points, const NoiseSpec& spec,
                       std::mt19937_64& rng) {
  if (spec.kind == NoiseKind::Pepper)
    throw std::invalid_argument("corrupt_subset: use add_pepper for pepper");
  const long n = points.cols();
  if (spec.count < 0 || spec.count > n) throw CountTooLarge(spec.count, n);

  // Partial Fisher-Yates: the first `count` entries are a uniform subset.
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  for (long i = 0; i < spec.count; ++i) {
    std::uniform_int_distribution<long> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<long> chosen(order.begin(), order.begin() + spec.count);
  std::sort(chosen.begin(), chosen.end());

  Dataset out;
  out.points = points;
  out.seed = spec.seed;
  for (long idx : chosen) {
    if (spec.level == 0) continue;
    out.points(0, idx) += draw_noise(spec.kind, spec.level, spec.convention, rng);
    out.points(1, idx) += draw_noise(spec.kind, spec.level, spec.convention, rng);
  }
  out.contaminated_indices = std::move(chosen);
  return out;
}

long pepper_count(double density, const BoundingBox& box) {
  if (density < 0 || density > 1)
    throw std::invalid_argument("pepper density must lie in [0, 1]");
  // Relative slack: products that are integral in exact arithmetic (e.g.
  // 0.001 * 1000 * 1000) must not floor to one below.
  const double raw = density * box.width * box.height;
  return static_cast<long>(std::floor(raw * (1 + 1e-12)));
}

Dataset add_pepper(Dataset data, double density, const BoundingBox& box,
                   std::mt19937_64& rng) {
  const long extra = pepper_count(density, box);
  if (extra == 0) return data;
  const long n = data.points.cols();
  std::uniform_real_distribution<double> ux(box.x0, box.x0 + box.width);
  std::uniform_real_distribution<double> uy(box.y0, box.y0 + box.height);
  data.points.conservativeResize(2, n + extra);
  for (long i = 0; i < extra; ++i) {
    data.points(0, n + i) = ux(rng);
    data.points(1, n + i) = uy(rng);
    data.contaminated_indices.push_back(n + i);
  }
  return data;
}

Dataset synthesize(const SynthSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Points2d pts = sample_ellipse(spec.truth, spec.n_points);
  pts = add_gaussian(pts, spec.jitter_variance, rng);
  Dataset data;
  if (spec.noise.kind == NoiseKind::Pepper) {
    data.points = pts;
    data = add_pepper(std::move(data), spec.noise.level, BoundingBox::of(pts),
                      rng);
  } else {
    NoiseSpec noise = spec.noise;
    noise.seed = seed;
    data = corrupt_subset(pts, noise, rng);
  }
  data.truth = spec.truth;
  data.seed = seed;
  return data;
}

}  // namespace ellfit
