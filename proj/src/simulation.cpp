#include "uqcal/simulation.hpp"
#include "uqcal/distributions.hpp"
#include "uqcal/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace uqcal {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0)
    throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 1");
  if (n == 1)
    return {lo};
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_nu_grid() { return log_grid(2.1, 100.0, 40); }

std::vector<SimPoint> sweep(std::span<const double> nu_grid, std::size_t m,
                            std::uint64_t seed, double level) {
  if (m < 100)
    throw std::invalid_argument("sweep: m must be >= 100");
  for (double nu : nu_grid)
    if (!(nu > 2.0))
      throw std::domain_error("sweep: grid values must exceed 2");

  std::vector<SimPoint> out;
  out.reserve(nu_grid.size());
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    const double nu = nu_grid[i];
    const ZSample z = sample_ts(nu, m, derive_seed(seed, i));
    SimPoint p;
    p.nu = nu;
    p.coverage = validate_picp95(z, level);
    p.beta_gm_z2 = p.coverage.beta_gm_z2;
    p.theoretical = coverage_of_interval(kFixedK95, nu);
    out.push_back(std::move(p));
  }
  return out;
}

} // namespace uqcal
