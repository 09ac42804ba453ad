#include "uqcal/distributions.hpp"
#include "uqcal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uqcal {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxCfIterations = 20000;
constexpr int kMaxSeriesTerms = 200000;

void require(bool ok, const char *what) {
  if (!ok)
    throw std::domain_error(what);
}

// Tail of Stirling's series for ln Gamma(x), x >= 15.
double stirling_tail(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

// ln B(a, b). For a large argument, ln Gamma(L) - ln Gamma(L + s) is summed
// from Stirling terms that do not cancel.
double log_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  if (big < 15.0)
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double diff = -(big - 0.5) * std::log1p(small / big) - small * std::log(big + small) +
                      small + stirling_tail(big) - stirling_tail(big + small);
  return std::lgamma(small) + diff;
}

// Continued fraction for I_x(a,b) (modified Lentz). Returns NaN on
// non-convergence.
double inc_beta_cf(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny)
    d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxCfIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny)
      d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny)
      c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny)
      d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny)
      c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      return h;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Power series sum_{n>=0} x^n (a+b)_n / (a+1)_n, so that
// I_x(a,b) = front / a * series.
double inc_beta_series(double x, double a, double b) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    term *= x * (a + b + n) / (a + 1.0 + n);
    sum += term;
    if (term < kEps * sum)
      break;
  }
  return sum;
}

// Argument of I_x(a,b) carried with 1 - x and both logarithms, so callers
// that know them exactly avoid the a * ln(x) rounding blow-up at large a.
struct BetaArg {
  double x, y, log_x, log_y;

  static BetaArg from_x(double x) { return {x, 1.0 - x, std::log(x), std::log1p(-x)}; }
  // x = r / (1 + r)
  static BetaArg from_ratio(double r) {
    const double l = std::log1p(r);
    return {r / (1.0 + r), 1.0 / (1.0 + r), std::log(r) - l, -l};
  }
  BetaArg swapped() const { return {y, x, log_y, log_x}; }
};

double inc_beta_lower(const BetaArg &arg, double a, double b, double lbeta) {
  const double front = std::exp(a * arg.log_x + b * arg.log_y - lbeta);
  if (front == 0.0)
    return 0.0;
  double cf = inc_beta_cf(arg.x, a, b);
  if (std::isnan(cf))
    return front / a * inc_beta_series(arg.x, a, b);
  return front * cf / a;
}

double reg_inc_beta_impl(const BetaArg &arg, double a, double b, double lbeta) {
  if (arg.x <= 0.0)
    return 0.0;
  if (arg.y <= 0.0)
    return 1.0;
  if (arg.x < (a + 1.0) / (a + b + 2.0))
    return inc_beta_lower(arg, a, b, lbeta);
  return 1.0 - inc_beta_lower(arg.swapped(), b, a, lbeta);
}

// Safeguarded Newton on a monotone CDF. `lo`/`hi` must bracket the root.
template <class Cdf, class Pdf>
double invert_cdf(const Cdf &cdf, const Pdf &pdf, double p, double lo,
                  double hi, double x) {
  for (int iter = 0; iter < 400; ++iter) {
    const double f = cdf(x) - p;
    if (f == 0.0)
      return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::fabs(x)))
      break;
    const double dens = pdf(x);
    double next = dens > 0.0 ? x - f / dens : lo;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x)))
      return next;
    x = next;
  }
  return x;
}

} // namespace

double reg_inc_beta(double x, double a, double b) {
  require(x >= 0.0 && x <= 1.0, "reg_inc_beta: x outside [0,1]");
  require(a > 0.0 && b > 0.0, "reg_inc_beta: a and b must be positive");
  if (x == 0.0)
    return 0.0;
  if (x == 1.0)
    return 1.0;
  return reg_inc_beta_impl(BetaArg::from_x(x), a, b, log_beta(a, b));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p outside (0,1)");
  if (p == 0.5)
    return 0.0;
  // Solve on the upper tail so that small p keeps full relative precision.
  const double q = p < 0.5 ? p : 1.0 - p;
  const auto neg_tail = [](double x) { return -0.5 * std::erfc(x / std::numbers::sqrt2); };
  double hi = 1.0;
  while (neg_tail(hi) < -q)
    hi *= 2.0;
  const double x = invert_cdf(neg_tail, normal_pdf, -q, 0.0, hi, 0.5 * hi);
  return p < 0.5 ? -x : x;
}

StudentT::StudentT(double nu) : nu_(nu) {
  require(nu > 0.0, "StudentT: nu must be positive");
  log_beta_ = log_beta(0.5 * nu, 0.5);
  log_pdf_norm_ = -log_beta_ - 0.5 * std::log(nu);
}

double StudentT::central(double t) const {
  require(t >= 0.0 || std::isnan(t), "StudentT::central: negative argument");
  if (std::isinf(t))
    return 1.0;
  const double t2 = t * t;
  if (t2 < nu_)
    return reg_inc_beta_impl(BetaArg::from_ratio(t2 / nu_), 0.5, 0.5 * nu_, log_beta_);
  return 1.0 - reg_inc_beta_impl(BetaArg::from_ratio(t2 / nu_).swapped(), 0.5 * nu_, 0.5, log_beta_);
}

double StudentT::cdf(double x) const {
  if (std::isinf(x))
    return x > 0 ? 1.0 : 0.0;
  if (x < 0.0)
    return upper_tail(-x);
  const double t2 = x * x;
  if (t2 < nu_)
    return 0.5 + 0.5 * reg_inc_beta_impl(BetaArg::from_ratio(t2 / nu_), 0.5, 0.5 * nu_, log_beta_);
  return 1.0 - upper_tail(x);
}

double StudentT::pdf(double x) const {
  return std::exp(log_pdf_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / nu_));
}

double StudentT::upper_tail(double t) const {
  const double t2 = t * t;
  if (t2 < nu_) {
    const double inner = reg_inc_beta_impl(BetaArg::from_ratio(t2 / nu_), 0.5, 0.5 * nu_, log_beta_);
    if (inner < 0.5)
      return 0.5 - 0.5 * inner;
  }
  return 0.5 * reg_inc_beta_impl(BetaArg::from_ratio(t2 / nu_).swapped(), 0.5 * nu_, 0.5, log_beta_);
}

double StudentT::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "t_quantile: p outside (0,1)");
  if (p == 0.5)
    return 0.0;
  const double q = p < 0.5 ? p : 1.0 - p;
  const auto neg_tail = [this](double x) { return -upper_tail(x); };
  const auto pdf = [this](double x) { return this->pdf(x); };
  double hi = 1.0;
  while (neg_tail(hi) < -q) {
    hi *= 2.0;
    if (!std::isfinite(hi))
      return p < 0.5 ? -hi : hi;
  }
  const double x = invert_cdf(neg_tail, pdf, -q, 0.0, hi, 0.5 * hi);
  return p < 0.5 ? -x : x;
}

double t_cdf(double x, double nu) { return StudentT(nu).cdf(x); }
double t_pdf(double x, double nu) { return StudentT(nu).pdf(x); }
double t_quantile(double p, double nu) { return StudentT(nu).quantile(p); }

namespace {
double unit_variance_factor(double nu) {
  require(nu > 2.0, "scaled t: nu must exceed 2");
  return std::sqrt(nu / (nu - 2.0));
}
} // namespace

double ts_cdf(double x, double nu) {
  const double s = unit_variance_factor(nu);
  return StudentT(nu).cdf(x * s);
}

double ts_pdf(double x, double nu) {
  const double s = unit_variance_factor(nu);
  return s * StudentT(nu).pdf(x * s);
}

double ts_quantile(double p, double nu) {
  const double s = unit_variance_factor(nu);
  return StudentT(nu).quantile(p) / s;
}

ScaledFParams ScaledFParams::unit_mean(double nu) {
  require(nu > 2.0, "ScaledFParams::unit_mean: nu must exceed 2");
  return {nu, (nu - 2.0) / nu};
}

ScaledF::ScaledF(ScaledFParams params) : params_(params), t_(params.nu) {
  require(params.scale > 0.0, "ScaledF: scale must be positive");
}

double ScaledF::cdf(double x) const {
  require(x >= 0.0, "fs_cdf: negative argument");
  if (x == 0.0)
    return 0.0;
  return t_.central(std::sqrt(x / params_.scale));
}

double ScaledF::pdf(double x) const {
  require(x >= 0.0, "fs_pdf: negative argument");
  if (x == 0.0)
    return std::numeric_limits<double>::infinity();
  const double y = x / params_.scale;
  const double t = std::sqrt(y);
  return t_.pdf(t) / (t * params_.scale);
}

double ScaledF::mean() const {
  if (params_.nu <= 2.0)
    return std::numeric_limits<double>::infinity();
  return params_.scale * params_.nu / (params_.nu - 2.0);
}

double fs_cdf(double x, ScaledFParams p) { return ScaledF(p).cdf(x); }
double fs_pdf(double x, ScaledFParams p) { return ScaledF(p).pdf(x); }

ZSample sample_ts(double nu, std::size_t m, std::uint64_t seed) {
  require(nu > 2.0, "sample_ts: nu must exceed 2");
  require(m >= 1, "sample_ts: empty sample requested");
  Rng rng(seed);
  std::vector<double> z(m);
  for (auto &v : z) {
    const double n = rng.normal();
    const double chi2 = rng.chi_squared(nu);
    v = n * std::sqrt((nu - 2.0) / chi2);
  }
  return ZSample(std::move(z));
}

ZSample sample_normal(std::size_t m, std::uint64_t seed) {
  require(m >= 1, "sample_normal: empty sample requested");
  Rng rng(seed);
  std::vector<double> z(m);
  for (auto &v : z)
    v = rng.normal();
  return ZSample(std::move(z));
}

} // namespace uqcal
