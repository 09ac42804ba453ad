#pragma once

// Seedable random streams with platform-independent output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard <random> distributions are implementation-defined,
// so every variate transform used here is written out explicitly:
//   uniform  : top 53 bits of one engine word, mapped to (0,1)
//   index    : modulo after rejecting the low 2^64 mod n words
//   normal   : Marsaglia polar method (spare value cached)
//   gamma    : Marsaglia-Tsang squeeze, with the U^(1/a) boost for a < 1
// Substream seeds are derived from (master seed, stream id) with SplitMix64.

#include <cstdint>
#include <random>
#include <string_view>

namespace uqcal {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for substream `stream` of `master`. Streams are independent of each
/// other and of how many streams are drawn.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// 64-bit FNV-1a hash, used to turn dataset ids into stream ids.
std::uint64_t stable_hash(std::string_view s);

class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1).
  double uniform();

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);

  double normal();

  /// Gamma(shape, 1). shape > 0.
  double gamma(double shape);

  /// Chi-squared with `dof` degrees of freedom (dof > 0, non-integer allowed).
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace uqcal
