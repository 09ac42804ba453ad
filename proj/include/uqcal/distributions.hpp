#pragma once

// Student's t and Fisher-Snedecor F(1, nu) distributions, plain and scaled to
// unit variance, together with the special functions they rest on.
//
// Domain violations throw std::domain_error.

#include "uqcal/zsample.hpp"

#include <cstddef>
#include <cstdint>

namespace uqcal {

/// Regularized incomplete beta I_x(a, b), absolute accuracy ~1e-13.
/// Requires 0 <= x <= 1, a > 0, b > 0.
double reg_inc_beta(double x, double a, double b);

double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

/// Student's t with `nu` > 0 degrees of freedom (non-integer allowed).
/// The log-beta normalizer is computed once, so repeated evaluation at a fixed
/// nu is cheaper than the free functions below.
class StudentT {
public:
  explicit StudentT(double nu);

  double nu() const { return nu_; }
  double cdf(double x) const;
  double pdf(double x) const;
  /// P(|T| <= t) for t >= 0, evaluated without cancellation.
  double central(double t) const;
  double quantile(double p) const;

private:
  double upper_tail(double t) const; // P(T > t), t >= 0
  double nu_;
  double log_beta_; // ln B(nu/2, 1/2)
  double log_pdf_norm_;
};

double t_cdf(double x, double nu);
double t_pdf(double x, double nu);
double t_quantile(double p, double nu);

// Unit-variance scaled t, t_s(nu) = t(nu) * sqrt((nu - 2) / nu). nu > 2.
double ts_cdf(double x, double nu);
double ts_pdf(double x, double nu);
double ts_quantile(double p, double nu);

/// scale * F(1, nu).
struct ScaledFParams {
  double nu = 0.0;
  double scale = 1.0;

  /// Scale giving mean 1: the law of Z^2 when Z ~ t_s(nu). Requires nu > 2.
  static ScaledFParams unit_mean(double nu);
};

/// CDF/PDF of scale * F(1, nu), with P(F(1,nu) <= y) = 2 t_cdf(sqrt(y), nu) - 1.
class ScaledF {
public:
  explicit ScaledF(ScaledFParams params);

  const ScaledFParams &params() const { return params_; }
  double cdf(double x) const;
  double pdf(double x) const;
  double mean() const; // +inf for nu <= 2

private:
  ScaledFParams params_;
  StudentT t_;
};

double fs_cdf(double x, ScaledFParams p);
double fs_pdf(double x, ScaledFParams p);

/// m i.i.d. draws from t_s(nu), computed as N * sqrt((nu - 2) / chi2_nu).
/// Output is bitwise reproducible for identical (nu, m, seed) on any platform.
ZSample sample_ts(double nu, std::size_t m, std::uint64_t seed);

/// m i.i.d. standard normal draws.
ZSample sample_normal(std::size_t m, std::uint64_t seed);

} // namespace uqcal
