#include "uqcal/coverage.hpp"
#include "uqcal/distributions.hpp"
#include "uqcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uqcal {

namespace {

CoverageResult judge(const ZSample &z, double p_target, double k, double level,
                     bool diagnostic) {
  const PicpCount count = picp(z, k);
  const Interval ci = wilson_ci(count.hits, count.m, level);

  CoverageResult r;
  r.p_target = p_target;
  r.k = k;
  r.hits = count.hits;
  r.m = count.m;
  r.picp = count.picp;
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.level = level;
  r.diagnostic = diagnostic;
  const auto sq = z.squared();
  r.beta_gm_z2 = try_beta_gm(sq);

  if (r.beta_gm_z2 && *r.beta_gm_z2 >= kPicpSkewThreshold)
    r.verdict = Verdict::Untestable;
  else if (r.ci_high >= p_target - kBandHalfWidth &&
           r.ci_low <= p_target + kBandHalfWidth)
    r.verdict = Verdict::Valid;
  else
    r.verdict = Verdict::Invalid;
  return r;
}

} // namespace

double k_factor(double p, double nu) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("k_factor: p outside (0,1)");
  return ts_quantile(0.5 * (1.0 + p), nu);
}

double coverage_of_interval(double a, double nu) {
  if (!(a > 0.0))
    throw std::domain_error("coverage_of_interval: a must be positive");
  if (!(nu > 2.0))
    throw std::domain_error("coverage_of_interval: nu must exceed 2");
  return StudentT(nu).central(a * std::sqrt(nu / (nu - 2.0)));
}

double coverage_threshold_nu(double a, double target, double tolerance,
                             double nu_max, double grid_step) {
  if (!(nu_max > 2.0) || !(grid_step > 0.0))
    throw std::domain_error("coverage_threshold_nu: bad grid");
  const auto violates = [&](double nu) {
    return std::fabs(coverage_of_interval(a, nu) - target) > tolerance;
  };
  const auto steps = static_cast<long>(std::floor((nu_max - 2.0) / grid_step));
  for (long i = steps; i >= 1; --i) {
    const double nu = 2.0 + static_cast<double>(i) * grid_step;
    if (!violates(nu))
      continue;
    if (i == steps)
      return nu_max; // violated at the top of the range
    double lo = nu;
    double hi = nu + grid_step;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (violates(mid) ? lo : hi) = mid;
    }
    return hi;
  }
  return 2.0 + grid_step;
}

PicpCount picp(const ZSample &z, double k) {
  if (!(k > 0.0))
    throw std::domain_error("picp: k must be positive");
  PicpCount c;
  c.m = z.size();
  for (double v : z.values())
    if (std::fabs(v) <= k)
      ++c.hits;
  c.picp = static_cast<double>(c.hits) / static_cast<double>(c.m);
  return c;
}

Interval wilson_ci(std::size_t hits, std::size_t m, double level) {
  if (m == 0 || hits > m)
    throw std::domain_error("wilson_ci: need 0 <= hits <= m and m >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("wilson_ci: level outside (0,1)");

  const double z = normal_quantile(0.5 * (1.0 + level));
  const double z2 = z * z;
  const double n = static_cast<double>(m);
  const double p = static_cast<double>(hits) / n;
  const double q = 1.0 - p;
  const double denom = 2.0 * (n + z2);

  Interval ci;
  if (hits == 0) {
    ci.low = 0.0;
  } else {
    const double rad = std::max(0.0, z2 - 2.0 - 1.0 / n + 4.0 * p * (n * q + 1.0));
    ci.low = std::max(0.0, (2.0 * n * p + z2 - 1.0 - z * std::sqrt(rad)) / denom);
  }
  if (hits == m) {
    ci.high = 1.0;
  } else {
    const double rad = std::max(0.0, z2 + 2.0 - 1.0 / n + 4.0 * p * (n * q - 1.0));
    ci.high = std::min(1.0, (2.0 * n * p + z2 + 1.0 + z * std::sqrt(rad)) / denom);
  }
  return ci;
}

CoverageResult validate_picp95(const ZSample &z, double level) {
  return judge(z, 0.95, kFixedK95, level, false);
}

CoverageResult picp_diagnostic(const ZSample &z, double p_target, double k,
                               double level) {
  if (!(p_target > 0.0 && p_target < 1.0))
    throw std::domain_error("picp_diagnostic: p_target outside (0,1)");
  return judge(z, p_target, k, level, true);
}

std::vector<std::vector<std::size_t>>
bin_by_uncertainty(std::span<const double> uncertainties, std::size_t n_bins) {
  if (n_bins == 0)
    throw std::invalid_argument("bin_by_uncertainty: n_bins must be >= 1");
  const std::size_t n = uncertainties.size();
  if (n_bins > n)
    throw std::invalid_argument("bin_by_uncertainty: more bins than points");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return uncertainties[a] < uncertainties[b];
  });

  const std::size_t base = n / n_bins;
  const std::size_t extra = n % n_bins;
  std::vector<std::vector<std::size_t>> bins(n_bins);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    bins[b].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                   order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return bins;
}

LcpResult lcp_analysis(std::span<const double> errors,
                       std::span<const double> uncertainties, std::size_t n_bins,
                       double level) {
  const ZSample all = z_scores(errors, uncertainties);
  LcpResult out;
  out.n_bins = n_bins;
  out.overall = validate_picp95(all, level);

  const auto groups = bin_by_uncertainty(uncertainties, n_bins);
  out.bins.reserve(groups.size());
  for (std::size_t b = 0; b < groups.size(); ++b) {
    // Within a bin, keep input order.
    std::vector<std::size_t> idx = groups[b];
    std::sort(idx.begin(), idx.end());
    std::vector<double> zb;
    zb.reserve(idx.size());
    for (std::size_t i : idx)
      zb.push_back(all[i]);
    LcpBin bin;
    bin.index = b;
    bin.ue_low = uncertainties[groups[b].front()];
    bin.ue_high = uncertainties[groups[b].back()];
    bin.coverage = validate_picp95(ZSample(std::move(zb)), level);
    out.bins.push_back(std::move(bin));
  }
  return out;
}

} // namespace uqcal
