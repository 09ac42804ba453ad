#pragma once

#include <optional>
#include <string_view>

namespace uqcal {

/// Outcome of a calibration test on one sample.
///
/// `Untestable` means the sample's tails are too heavy for the test to be
/// reliable; it is not a failed test.
enum class Verdict { Valid, Invalid, Untestable };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Valid:
    return "valid";
  case Verdict::Invalid:
    return "invalid";
  case Verdict::Untestable:
    return "untestable";
  }
  return "unknown";
}

std::optional<Verdict> verdict_from_string(std::string_view s);

} // namespace uqcal
