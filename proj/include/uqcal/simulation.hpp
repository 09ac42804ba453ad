#pragma once

#include "uqcal/coverage.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uqcal {

/// PICP_95 of one synthetic t_s(nu) sample next to its theoretical value.
struct SimPoint {
  double nu = 0.0;
  std::optional<double> beta_gm_z2;
  CoverageResult coverage;
  double theoretical = 0.0; // coverage_of_interval(1.96, nu)

  friend bool operator==(const SimPoint &, const SimPoint &) = default;
};

/// `n` log-spaced values in [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// 40 log-spaced points in [2.1, 100].
std::vector<double> default_nu_grid();

/// One SimPoint per grid value, in grid order. Grid point i draws its sample
/// from substream derive_seed(seed, i). Requires every nu > 2 and m >= 100.
std::vector<SimPoint> sweep(std::span<const double> nu_grid, std::size_t m,
                            std::uint64_t seed, double level = kDefaultCiLevel);

} // namespace uqcal
