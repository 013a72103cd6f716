#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "ellfit/lca.hpp"

using namespace ellfit;

namespace {

const ThresholdConfig kHard{std::numeric_limits<double>::infinity(), 0.0, 1.0, false};

std::vector<ThresholdConfig> all_configs() {
  return {ThresholdConfig::L1(), ThresholdConfig::L0(), ThresholdConfig::L2(), kHard,
          ThresholdConfig{50.0, 1.0, 1.0, false}, ThresholdConfig{3.0, 0.5, 0.7, false}};
}

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(2.0, 1.0) == 1.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(1.0, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("general threshold presets") {
  CHECK(general_threshold(2.0, ThresholdConfig::L1()) == 1.0);
  CHECK(general_threshold(2.0, kHard) == 2.0);
  CHECK(general_threshold(0.5, kHard) == 0.0);
  CHECK(general_threshold(1.0, kHard) == 0.0);
  CHECK(general_threshold(-2.5, ThresholdConfig::L2()) == -2.5);

  // (10000, 0, 1) at u = 1.001: 1.001 / (1 + e^{-10}).
  const double want = 1.001 / (1.0 + std::exp(-10.0));
  CHECK(general_threshold(1.001, ThresholdConfig::L0()) == doctest::Approx(want).epsilon(1e-15));
  CHECK(general_threshold(1.001, ThresholdConfig::L0()) == doctest::Approx(1.0009546).epsilon(1e-7));
}

TEST_CASE("presets match the piecewise definitions on a dense grid") {
  for (int k = -5000; k <= 5000; ++k) {
    const double u = k * 1e-3;
    const double soft = std::abs(u) <= 1 ? 0.0 : u - (u > 0 ? 1 : -1);
    const double hard = std::abs(u) <= 1 ? 0.0 : u;
    REQUIRE(general_threshold(u, ThresholdConfig::L1()) == soft);
    REQUIRE(soft_threshold(u, 1.0) == soft);
    REQUIRE(general_threshold(u, kHard) == hard);
  }
}

TEST_CASE("threshold_vector") {
  Eigen::VectorXd u(3);
  u << 0, 2, -2;
  const Eigen::VectorXd z = threshold_vector(u, ThresholdConfig::L1());
  CHECK(z(0) == 0);
  CHECK(z(1) == 1);
  CHECK(z(2) == -1);

  Eigen::VectorXd v(2);
  v << 0.5, 1.5;
  const Eigen::VectorXd w = threshold_vector(v, ThresholdConfig::L0());
  CHECK(std::abs(w(0)) < 1e-300);
  CHECK(w(1) == doctest::Approx(1.5).epsilon(1e-15));

  CHECK(threshold_vector(Eigen::VectorXd(0), ThresholdConfig::L0()).size() == 0);
}

TEST_CASE("exponent clamp stays finite and exact") {
  const ThresholdConfig steep{1e9, 0.0, 1.0, false};
  CHECK(general_threshold(0.0, steep) == 0.0);
  // The exponent saturates at 700: 0.5 / (1 + e^700), tiny but not zero.
  CHECK(general_threshold(0.5, steep) == doctest::Approx(0.5 * std::exp(-700.0)).epsilon(1e-12));
  CHECK(general_threshold(5.0, steep) == 5.0);
  CHECK(std::isfinite(threshold_slope(0.5, steep)));
  CHECK(std::isfinite(threshold_slope(1.0 - 1e-6, ThresholdConfig::L0())));
  // Below the clamp the value is untouched: 0.9 / (1 + e^{1000}) is ~0.
  CHECK(std::abs(general_threshold(0.9, ThresholdConfig::L0())) <= 1e-300);
}

TEST_CASE("threshold slope") {
  CHECK(threshold_slope(2.0, ThresholdConfig::L1()) == 1.0);
  CHECK(threshold_slope(0.5, ThresholdConfig::L1()) == 0.0);
  CHECK(threshold_slope(3.0, ThresholdConfig::L2()) == 1.0);
  CHECK(threshold_slope(2.0, ThresholdConfig::L0()) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<ThresholdConfig> finite = {
      ThresholdConfig::L0(), {50.0, 1.0, 1.0, false}, {3.0, 0.5, 0.7, false}, {1.0, 0.0, 2.0, false}};
  for (const auto& cfg : finite) {
    // Central differences with a step well inside the sigmoid's width.
    const double h = 1e-4 / cfg.eta;
    for (int k = -300; k <= 300; ++k) {
      const double u = k * 0.01 + 0.00123;
      const double fd = (general_threshold(u + h, cfg) - general_threshold(u - h, cfg)) / (2 * h);
      const double s = threshold_slope(u, cfg);
      const double scale = std::max(std::abs(fd), 1e-3);
      REQUIRE(std::abs(s - fd) / scale < 1e-5);
    }
  }
}

TEST_CASE("property: odd symmetry") {
  for (const auto& cfg : all_configs())
    for (int k = 0; k <= 2000; ++k) {
      const double u = k * 2.5e-3;
      REQUIRE(general_threshold(-u, cfg) == -general_threshold(u, cfg));
    }
}

TEST_CASE("property: monotone for the delta in {0, 1} presets") {
  for (const auto& cfg : {ThresholdConfig::L1(), ThresholdConfig::L0(), kHard}) {
    double prev = general_threshold(-5.0, cfg);
    for (int k = -4999; k <= 5000; ++k) {
      const double z = general_threshold(k * 1e-3, cfg);
      REQUIRE(z >= prev);
      prev = z;
    }
  }
}

TEST_CASE("property: steep sigmoid approaches the soft threshold") {
  const ThresholdConfig steep{1e6, 1.0, 1.0, false};
  for (int k = -5000; k <= 5000; ++k) {
    const double u = k * 1e-3;
    if (std::abs(std::abs(u) - 1.0) <= 0.01) continue;
    REQUIRE(std::abs(general_threshold(u, steep) - soft_threshold(u, 1.0)) < 1e-6);
  }
}

TEST_CASE("property: internal-state identity and dead zone") {
  for (const auto& cfg : all_configs())
    for (int k = -400; k <= 400; ++k) {
      const double u = k * 0.0125;
      const double z = general_threshold(u, cfg);
      // Exact when z and u agree in sign to within a factor two, one rounding otherwise.
      const double back = z + (u - z);
      if (z * u > 0 && std::abs(z) >= std::abs(u) / 2 && std::abs(z) <= 2 * std::abs(u)) REQUIRE(back == u);
      REQUIRE(std::abs(back - u) <= std::numeric_limits<double>::epsilon() * (std::abs(z) + std::abs(u - z)));
      if (cfg.infinite() && !cfg.identity && z == 0) REQUIRE(std::abs(u) <= cfg.lambda);
    }
}

TEST_CASE("property: hard threshold never lands in the gap") {
  for (int k = -5000; k <= 5000; ++k) {
    const double z = general_threshold(k * 1e-3, kHard);
    REQUIRE((z == 0 || std::abs(z) > 1.0));
  }
}
