#include "uqcal/zsample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uqcal {

ZSample::ZSample(std::vector<double> z) : z_(std::move(z)) {
  if (z_.empty())
    throw std::invalid_argument("ZSample: empty sample");
  for (std::size_t i = 0; i < z_.size(); ++i)
    if (!std::isfinite(z_[i]))
      throw std::invalid_argument("ZSample: non-finite value at index " +
                                  std::to_string(i));
}

std::vector<double> ZSample::squared() const {
  std::vector<double> out(z_.size());
  for (std::size_t i = 0; i < z_.size(); ++i)
    out[i] = z_[i] * z_[i];
  return out;
}

} // namespace uqcal
