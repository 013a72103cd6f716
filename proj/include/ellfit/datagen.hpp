#ifndef ELLFIT_DATAGEN_HPP_
#define ELLFIT_DATAGEN_HPP_

// Synthetic point sets: boundary samples, Gaussian jitter, outliers on a
// random subset, and pepper-noise points scattered over a bounding box.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "ellfit/conic.hpp"

namespace ellfit {

enum class NoiseKind { Laplacian, Uniform, Pepper };

/// How `NoiseSpec::level` is read: as the standard deviation of the
/// distribution, or as its native scale (Laplace b, uniform half-width).
enum class NoiseConvention { Std, Scale };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);
std::string_view to_string(NoiseConvention c);
NoiseConvention parse_noise_convention(std::string_view text);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Laplacian;
  double level = 0.0;  // std (or scale) for Laplacian/Uniform, density for Pepper
  long count = 0;      // contaminated points, Laplacian/Uniform only
  std::uint64_t seed = 0;
  NoiseConvention convention = NoiseConvention::Std;
};

struct Dataset {
  Points2d points;
  std::optional<Ellipse> truth;
  std::vector<long> contaminated_indices;  // sorted, distinct
  std::uint64_t seed = 0;
};

struct BoundingBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;

  static BoundingBox of(const Points2d& points);
};

/// n points at parameters t_i = 2 pi i / n.
Points2d sample_ellipse(const Ellipse& e, long n);

/// Adds i.i.d. N(0, variance) to every coordinate.
Points2d add_gaussian(const Points2d& points, double variance,
                      std::mt19937_64& rng);

/// Perturbs both coordinates of `spec.count` distinct random points with
/// zero-mean Laplacian or uniform noise. Throws CountTooLarge.
Dataset corrupt_subset(const Points2d& points, const NoiseSpec& spec,
                       std::mt19937_64& rng);

/// Number of pepper points for a density over a box: floor(density * W * H).
long pepper_count(double density, const BoundingBox& box);

/// Appends pepper_count(density, box) points uniform over `box`; the new
/// indices are added to contaminated_indices.
Dataset add_pepper(Dataset data, double density, const BoundingBox& box,
                   std::mt19937_64& rng);

/// Draws a Laplacian / uniform variate of the given level under `convention`.
double draw_noise(NoiseKind kind, double level, NoiseConvention convention,
                  std::mt19937_64& rng);

struct SynthSpec {
  Ellipse truth{0.0, 0.0, 2.0, 1.0, 0.5235987755982988};
  long n_points = 100;
  double jitter_variance = 1e-8;
  NoiseSpec noise;
};

/// Boundary sampling, jitter and contamination driven by one seed.
Dataset synthesize(const SynthSpec& spec, std::uint64_t seed);

}  // namespace ellfit

#endif  // ELLFIT_DATAGEN_HPP_
