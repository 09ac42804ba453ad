#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uqcal {

/// A nonempty sequence of finite z-scores (errors divided by uncertainties).
class ZSample {
public:
  /// Throws std::invalid_argument if `z` is empty or holds a non-finite value.
  explicit ZSample(std::vector<double> z);

  std::span<const double> values() const { return z_; }
  std::size_t size() const { return z_.size(); }
  double operator[](std::size_t i) const { return z_[i]; }

  /// Elementwise squares, in sample order.
  std::vector<double> squared() const;

  friend bool operator==(const ZSample &, const ZSample &) = default;

private:
  std::vector<double> z_;
};

} // namespace uqcal
