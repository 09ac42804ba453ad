#include "uqcal/fitting.hpp"
#include "uqcal/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace uqcal {

double ks_distance(std::span<const double> sample,
                   const std::function<double(double)> &cdf) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return ks_distance_sorted(sorted, cdf);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("ks_critical_value: need n >= 1 and alpha in (0,1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

namespace {

using Point = std::vector<double>;

struct Simplex {
  std::vector<Point> x;
  std::vector<double> f;
};

} // namespace

NelderMeadResult nelder_mead(const Objective &objective, std::vector<double> x0,
                             const NelderMeadOptions &opt) {
  const std::size_t n = x0.size();
  if (n == 0)
    throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (!opt.initial_step.empty() && opt.initial_step.size() != n)
    throw std::invalid_argument("nelder_mead: initial_step size mismatch");

  NelderMeadResult result;
  const auto eval = [&](const Point &p) {
    ++result.evaluations;
    const double v = objective(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Simplex s;
  s.x.assign(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    double step = opt.initial_step.empty()
                      ? (x0[i] != 0.0 ? 0.05 * std::fabs(x0[i]) : 0.00025)
                      : opt.initial_step[i];
    s.x[i + 1][i] += step;
  }
  s.f.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    s.f[i] = eval(s.x[i]);
    if (!std::isfinite(s.f[i]))
      throw std::domain_error("nelder_mead: objective not finite on the initial simplex");
  }

  std::vector<std::size_t> order(n + 1);
  const auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
  };
  const auto affine = [&](const Point &base, const Point &dir_from, double t) {
    // base + t * (base - dir_from)
    Point out(n);
    for (std::size_t j = 0; j < n; ++j)
      out[j] = base[j] + t * (base[j] - dir_from[j]);
    return out;
  };

  for (;;) {
    sort_vertices();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    double width = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        width = std::max(width, std::fabs(s.x[order[k]][j] - s.x[best][j]));
    if (s.f[worst] - s.f[best] < opt.f_tolerance && width <= opt.x_tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= opt.max_iterations)
      break;
    ++result.iterations;

    Point centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        centroid[j] += s.x[order[k]][j];
    for (auto &c : centroid)
      c /= static_cast<double>(n);

    const Point xr = affine(centroid, s.x[worst], opt.reflection);
    const double fr = eval(xr);

    if (fr < s.f[best]) {
      const Point xe = affine(centroid, s.x[worst], opt.reflection * opt.expansion);
      const double fe = eval(xe);
      if (fe < fr) {
        s.x[worst] = xe;
        s.f[worst] = fe;
      } else {
        s.x[worst] = xr;
        s.f[worst] = fr;
      }
      continue;
    }
    if (fr < s.f[second]) {
      s.x[worst] = xr;
      s.f[worst] = fr;
      continue;
    }

    bool accepted = false;
    if (fr < s.f[worst]) {
      const Point xc = affine(centroid, s.x[worst], opt.reflection * opt.contraction);
      const double fc = eval(xc);
      if (fc <= fr) {
        s.x[worst] = xc;
        s.f[worst] = fc;
        accepted = true;
      }
    } else {
      const Point xcc = affine(centroid, s.x[worst], -opt.contraction);
      const double fcc = eval(xcc);
      if (fcc < s.f[worst]) {
        s.x[worst] = xcc;
        s.f[worst] = fcc;
        accepted = true;
      }
    }
    if (accepted)
      continue;

    for (std::size_t k = 1; k <= n; ++k) {
      Point &v = s.x[order[k]];
      for (std::size_t j = 0; j < n; ++j)
        v[j] = s.x[best][j] + opt.shrink * (v[j] - s.x[best][j]);
      s.f[order[k]] = eval(v);
    }
  }

  result.x = s.x[order.front()];
  result.f = s.f[order.front()];
  return result;
}

namespace {

void check_fit_sample(std::span<const double> z2) {
  if (z2.empty())
    throw std::invalid_argument("fit_scaled_f: empty sample");
  bool any_positive = false;
  for (double v : z2) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("fit_scaled_f: values must be finite and nonnegative");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive)
    throw std::invalid_argument("fit_scaled_f: all-zero sample");
}

} // namespace

FitResult fit_scaled_f(std::span<const double> z2, const FitOptions &options) {
  check_fit_sample(z2);
  if (options.start_nus.empty())
    throw std::invalid_argument("fit_scaled_f: no starting points");

  std::vector<double> sorted(z2.begin(), z2.end());
  std::sort(sorted.begin(), sorted.end());
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());

  // Free mode: theta = (ln nu, ln scale). Unit-mean mode: theta = ln(nu - 2).
  const double theta_nu_max = options.unit_mean ? std::log(options.nu_max - 2.0)
                                                : std::log(options.nu_max);
  const auto to_params = [&](std::span<const double> theta) {
    const double t = std::min(theta[0], theta_nu_max);
    if (options.unit_mean)
      return ScaledFParams::unit_mean(2.0 + std::exp(t));
    return ScaledFParams{std::exp(t), std::exp(theta[1])};
  };
  const Objective objective = [&](std::span<const double> theta) {
    const ScaledFParams p = to_params(theta);
    if (!(p.nu > 0.0) || !(p.scale > 0.0) || !std::isfinite(p.scale))
      return 1.0;
    const ScaledF dist(p);
    return ks_distance_sorted(sorted, [&](double x) { return dist.cdf(x); });
  };

  NelderMeadOptions nm = options.optimizer;
  FitResult best;
  bool have_best = false;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;
  for (std::size_t i = 0; i < options.start_nus.size(); ++i) {
    const double nu0 = options.start_nus[i];
    std::vector<double> theta0;
    if (options.unit_mean) {
      theta0 = {std::log(std::max(nu0 - 2.0, 1e-3))};
      if (nm.initial_step.size() != 1)
        nm.initial_step = {0.5};
    } else {
      const double scale0 = nu0 > 2.0 ? mean * (nu0 - 2.0) / nu0 : mean / nu0;
      theta0 = {std::log(nu0), std::log(scale0)};
      if (nm.initial_step.size() != 2)
        nm.initial_step = {0.5, 0.5};
    }
    const NelderMeadResult r = nelder_mead(objective, theta0, nm);
    if (!have_best || r.f < best_f) {
      have_best = true;
      best_f = r.f;
      best_theta = r.x;
      best.converged = r.converged;
      best.best_start = i;
    }
  }

  const ScaledFParams p = to_params(best_theta);
  best.nu = p.nu;
  best.scale = p.scale;
  best.unit_mean = options.unit_mean;
  best.n_restarts_used = options.start_nus.size();
  best.reliable = z2.size() >= kMinFitSize;
  const ScaledF dist(p);
  best.ks = ks_distance(z2, [&](double x) { return dist.cdf(x); });
  return best;
}

} // namespace uqcal
