#pragma once

// Variance-based calibration statistics (ZMS, RCE), the Groeneveld-Meeden
// skewness used as a heavy-tail gate, and bootstrap validation of ZMS.

#include "uqcal/verdict.hpp"
#include "uqcal/zsample.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace uqcal {

/// ZMS is not reliably testable when beta_GM(Z^2) reaches this value.
inline constexpr double kZmsSkewThreshold = 0.80;

/// Z = E / uE. Throws std::invalid_argument on length mismatch, empty input,
/// or a nonpositive / non-finite uncertainty.
ZSample z_scores(std::span<const double> errors,
                 std::span<const double> uncertainties);

/// Mean of z^2.
double zms(const ZSample &z);

/// (RMS(uE) - RMS(E)) / RMS(uE).
double rce(std::span<const double> errors,
           std::span<const double> uncertainties);

/// Median; the mean of the two central order statistics for even sizes.
double median(std::span<const double> x);

/// Groeneveld-Meeden skewness (mean - median) / mean|x - median|, in [-1, 1].
/// Throws std::domain_error for fewer than two values or a constant sample.
double beta_gm(std::span<const double> x);

/// As beta_gm, but returns nullopt where the skewness is undefined.
std::optional<double> try_beta_gm(std::span<const double> x);

struct BootstrapInterval {
  double low = 0.0;
  double high = 0.0;
  bool degenerate = false; // zero-width: every resample gave the same ZMS
};

/// Percentile bootstrap interval for ZMS.
///
/// Resampling runs over the sample sorted ascending, so the interval does not
/// depend on input order. Requires size >= 2, n_boot >= 100, 0 < level < 1.
BootstrapInterval bootstrap_ci_zms(const ZSample &z, std::size_t n_boot,
                                   double level, std::uint64_t seed);

struct ZmsOptions {
  std::size_t n_boot = 5000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

struct ZmsResult {
  double zms = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_boot = 0;
  double level = 0.95;
  std::optional<double> beta_gm_z2;
  bool degenerate = false;
  Verdict verdict = Verdict::Untestable;

  friend bool operator==(const ZmsResult &, const ZmsResult &) = default;
};

/// ZMS = 1 test: Untestable when beta_GM(Z^2) >= 0.80, otherwise Valid iff the
/// bootstrap interval contains 1. A constant |Z| has no tail and is never
/// gated.
ZmsResult validate_zms(const ZSample &z, const ZmsOptions &options);

} // namespace uqcal
