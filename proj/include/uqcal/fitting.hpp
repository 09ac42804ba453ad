#pragma once

// Maximum goodness-of-fit estimation of scale * F(1, nu) for squared
// z-scores: the Kolmogorov-Smirnov distance is minimized with a multi-start
// Nelder-Mead simplex in log-parameter space.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace uqcal {

/// KS distance between an ascending sample and a CDF:
/// max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
template <class Cdf>
double ks_distance_sorted(std::span<const double> sorted, const Cdf &cdf) {
  if (sorted.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(above, below));
  }
  return d;
}

/// KS distance for a sample in any order.
double ks_distance(std::span<const double> sample,
                   const std::function<double(double)> &cdf);

/// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Converged when max - min of the simplex objective values drops below
  /// f_tolerance and no vertex is further than x_tolerance (per coordinate)
  /// from the best one.
  double f_tolerance = 1e-9;
  double x_tolerance = 1e-8;
  std::size_t max_iterations = 2000;
  /// Per-coordinate initial simplex offsets. Empty: 5 % of |x0_i|, or
  /// 0.00025 for zero coordinates.
  std::vector<double> initial_step;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Deterministic simplex minimization. Non-finite values met during the search
/// are treated as +inf. Throws std::domain_error if the objective is not
/// finite at every vertex of the initial simplex.
NelderMeadResult nelder_mead(const Objective &objective, std::vector<double> x0,
                             const NelderMeadOptions &options = {});

struct FitOptions {
  /// Constrain scale = (nu - 2) / nu (mean 1); only nu is fitted, nu > 2.
  bool unit_mean = false;
  std::vector<double> start_nus{3.0, 6.0, 12.0, 50.0, 500.0};
  /// Upper bound on nu. Beyond it F(1, nu) is indistinguishable from chi2_1
  /// at any practical sample size.
  double nu_max = 1e5;
  NelderMeadOptions optimizer{};
};

struct FitResult {
  double nu = 0.0;
  double scale = 0.0;
  double ks = 1.0;
  bool converged = false;
  std::size_t n_restarts_used = 0;
  std::size_t best_start = 0;
  bool unit_mean = false;
  /// False for samples smaller than kMinFitSize.
  bool reliable = true;

  friend bool operator==(const FitResult &, const FitResult &) = default;
};

inline constexpr std::size_t kMinFitSize = 50;

/// Fits scale * F(1, nu) to nonnegative `z2` by KS-distance minimization.
/// Throws std::invalid_argument for empty, negative, non-finite or all-zero
/// samples.
FitResult fit_scaled_f(std::span<const double> z2, const FitOptions &options = {});

} // namespace uqcal
