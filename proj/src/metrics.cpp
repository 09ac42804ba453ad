#include "uqcal/metrics.hpp"
#include "uqcal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqcal {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x)
    s += v * v;
  return s / static_cast<double>(x.size());
}

// Type-7 (linear interpolation) quantile of an ascending sequence.
double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

ZSample z_scores(std::span<const double> errors,
                 std::span<const double> uncertainties) {
  if (errors.size() != uncertainties.size())
    throw std::invalid_argument("z_scores: errors and uncertainties differ in length");
  if (errors.empty())
    throw std::invalid_argument("z_scores: empty input");
  std::vector<double> z(errors.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double u = uncertainties[i];
    if (!(u > 0.0) || !std::isfinite(u))
      throw std::invalid_argument("z_scores: uncertainty at index " +
                                  std::to_string(i) +
                                  " is not a positive finite number");
    z[i] = errors[i] / u;
  }
  return ZSample(std::move(z));
}

double zms(const ZSample &z) { return mean_square(z.values()); }

double rce(std::span<const double> errors,
           std::span<const double> uncertainties) {
  if (errors.size() != uncertainties.size())
    throw std::invalid_argument("rce: errors and uncertainties differ in length");
  if (errors.empty())
    throw std::invalid_argument("rce: empty input");
  const double rms_u = std::sqrt(mean_square(uncertainties));
  if (rms_u == 0.0)
    throw std::invalid_argument("rce: all uncertainties are zero");
  const double rms_e = std::sqrt(mean_square(errors));
  return (rms_u - rms_e) / rms_u;
}

double median(std::span<const double> x) {
  if (x.empty())
    throw std::domain_error("median: empty sample");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1)
    return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

std::optional<double> try_beta_gm(std::span<const double> x) {
  if (x.size() < 2)
    return std::nullopt;
  const double med = median(x);
  const double mean = mean_of(x);
  double mad = 0.0;
  for (double v : x)
    mad += std::fabs(v - med);
  mad /= static_cast<double>(x.size());
  if (mad == 0.0)
    return std::nullopt;
  const double num = mean - med;
  if (num == 0.0)
    return 0.0;
  // |mean - med| <= mean|x - med| holds exactly; clamp rounding excursions.
  return std::clamp(num / mad, -1.0, 1.0);
}

double beta_gm(std::span<const double> x) {
  if (x.size() < 2)
    throw std::domain_error("beta_gm: need at least two values");
  const auto b = try_beta_gm(x);
  if (!b)
    throw std::domain_error("beta_gm: constant sample, skewness undefined");
  return *b;
}

BootstrapInterval bootstrap_ci_zms(const ZSample &z, std::size_t n_boot,
                                   double level, std::uint64_t seed) {
  if (z.size() < 2)
    throw std::domain_error("bootstrap_ci_zms: need at least two values");
  if (n_boot < 100)
    throw std::domain_error("bootstrap_ci_zms: n_boot must be >= 100");
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("bootstrap_ci_zms: level outside (0,1)");

  std::vector<double> sq = z.squared();
  std::sort(sq.begin(), sq.end());
  const std::size_t m = sq.size();

  Rng rng(seed);
  std::vector<double> stats(n_boot);
  for (auto &s : stats) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += sq[rng.index(m)];
    s = acc / static_cast<double>(m);
  }
  std::sort(stats.begin(), stats.end());

  const double alpha = 1.0 - level;
  BootstrapInterval out;
  out.low = sorted_quantile(stats, 0.5 * alpha);
  out.high = sorted_quantile(stats, 1.0 - 0.5 * alpha);
  out.degenerate = sq.front() == sq.back();
  return out;
}

ZmsResult validate_zms(const ZSample &z, const ZmsOptions &options) {
  ZmsResult r;
  r.zms = zms(z);
  r.n_boot = options.n_boot;
  r.level = options.level;
  const auto ci = bootstrap_ci_zms(z, options.n_boot, options.level, options.seed);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.degenerate = ci.degenerate;
  const auto sq = z.squared();
  r.beta_gm_z2 = try_beta_gm(sq);
  if (r.beta_gm_z2 && *r.beta_gm_z2 >= kZmsSkewThreshold)
    r.verdict = Verdict::Untestable;
  else if (r.ci_low <= 1.0 && 1.0 <= r.ci_high)
    r.verdict = Verdict::Valid;
  else
    r.verdict = Verdict::Invalid;
  return r;
}

} // namespace uqcal
