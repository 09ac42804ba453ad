#pragma once

// Interval-based calibration: enlargement factors and theoretical coverage for
// unit-variance t_s(nu), empirical PICP with continuity-corrected Wilson
// intervals, the relaxed 95 % validity band, and the binned local (LCP)
// analysis.

#include "uqcal/verdict.hpp"
#include "uqcal/zsample.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace uqcal {

inline constexpr double kFixedK95 = 1.96;
inline constexpr double kPicpSkewThreshold = 0.85;
inline constexpr double kBandHalfWidth = 0.005;
inline constexpr double kDefaultCiLevel = 0.95;
inline constexpr std::size_t kDefaultLcpBins = 20;

/// Half-width of the symmetric p-interval of t_s(nu): ts_quantile((1+p)/2, nu).
double k_factor(double p, double nu);

/// P(|Z| <= a) for Z ~ t_s(nu).
double coverage_of_interval(double a, double nu);

/// Smallest nu* such that |coverage_of_interval(a, nu) - target| <= tolerance
/// for every nu >= nu* up to `nu_max`, located by a scan on a grid of step
/// `grid_step` followed by bisection on the last crossing.
double coverage_threshold_nu(double a = kFixedK95, double target = 0.95,
                             double tolerance = kBandHalfWidth,
                             double nu_max = 100.0, double grid_step = 0.01);

struct PicpCount {
  std::size_t hits = 0;
  std::size_t m = 0;
  double picp = 0.0;
};

/// hits = #{|z| <= k}; the boundary counts inside.
PicpCount picp(const ZSample &z, double k);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Continuity-corrected Wilson score interval (Newcombe's method 4) for a
/// binomial proportion hits/m at confidence `level`.
Interval wilson_ci(std::size_t hits, std::size_t m, double level);

struct CoverageResult {
  double p_target = 0.95;
  double k = kFixedK95;
  std::size_t hits = 0;
  std::size_t m = 0;
  double picp = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = kDefaultCiLevel;
  std::optional<double> beta_gm_z2;
  /// True for non-95 % levels, where a fixed k is not stable in nu.
  bool diagnostic = false;
  Verdict verdict = Verdict::Untestable;

  friend bool operator==(const CoverageResult &, const CoverageResult &) = default;
};

/// Binding 95 % test with k = 1.96: Untestable when beta_GM(Z^2) >= 0.85,
/// else Valid iff ci_high >= 0.945 and ci_low <= 0.955.
CoverageResult validate_picp95(const ZSample &z, double level = kDefaultCiLevel);

/// Same computation with caller-supplied target and k, judged against
/// [p_target - 0.005, p_target + 0.005]. Flagged diagnostic.
CoverageResult picp_diagnostic(const ZSample &z, double p_target, double k,
                               double level = kDefaultCiLevel);

/// Indices sorted by ascending uncertainty (stable), cut into n_bins
/// contiguous groups; the first (size % n_bins) groups take one extra element.
std::vector<std::vector<std::size_t>>
bin_by_uncertainty(std::span<const double> uncertainties, std::size_t n_bins);

struct LcpBin {
  std::size_t index = 0;
  double ue_low = 0.0;
  double ue_high = 0.0;
  CoverageResult coverage;

  friend bool operator==(const LcpBin &, const LcpBin &) = default;
};

struct LcpResult {
  std::vector<LcpBin> bins;
  std::size_t n_bins = 0;
  CoverageResult overall;

  friend bool operator==(const LcpResult &, const LcpResult &) = default;
};

/// Local PICP_95 over equal-size uncertainty bins. Each bin is gated and
/// judged exactly as validate_picp95; `overall` is validate_picp95 on the
/// whole set.
LcpResult lcp_analysis(std::span<const double> errors,
                       std::span<const double> uncertainties,
                       std::size_t n_bins = kDefaultLcpBins,
                       double level = kDefaultCiLevel);

} // namespace uqcal
