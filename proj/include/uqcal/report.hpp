#pragma once

// End-to-end analysis of one dataset, the report document it produces, and
// the cross-dataset comparison of PICP and ZMS verdicts.

#include "uqcal/coverage.hpp"
#include "uqcal/dataset.hpp"
#include "uqcal/fitting.hpp"
#include "uqcal/metrics.hpp"
#include "uqcal/simulation.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqcal {

/// Coverage of +-1 for a standard normal, the target of the 1-sigma
/// diagnostic.
inline constexpr double kOneSigmaTarget = 0.6826894921370859;

struct AnalysisConfig {
  std::uint64_t seed = 0;
  std::size_t n_boot = 5000;
  double level = kDefaultCiLevel;
  bool run_lcp = true;
  std::size_t lcp_bins = kDefaultLcpBins;
  bool run_fit = false;
  bool fit_unit_mean = false;
};

struct Report {
  int schema_version = 0;
  std::string tool_version;
  std::string dataset_id;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  ZmsResult zms;
  double rce = 0.0;
  std::optional<double> beta_gm_z2;
  std::optional<double> beta_gm_ue2;
  CoverageResult picp_2sigma; // binding
  CoverageResult picp_1sigma; // diagnostic
  std::optional<LcpResult> lcp;
  std::optional<FitResult> fit;

  friend bool operator==(const Report &, const Report &) = default;
};

/// Seed used for the ZMS bootstrap of a dataset: a substream of the master
/// seed keyed by the dataset id.
std::uint64_t dataset_seed(std::uint64_t master, std::string_view dataset_id);

/// Runs ZMS/RCE, skewness, PICP at 2 sigma (binding) and 1 sigma
/// (diagnostic), and optionally LCP and the scaled-F fit. Errors are rethrown
/// as std::runtime_error prefixed with the dataset id.
Report analyze(const Dataset &ds, const AnalysisConfig &config);

/// JSON with a fixed field order. Byte-identical for equal reports.
std::string serialize(const Report &report);
Report deserialize_report(std::string_view json);

std::string serialize(std::span<const SimPoint> points, std::size_t m,
                      std::uint64_t seed);
std::vector<SimPoint> deserialize_sweep(std::string_view json);

/// One line per report: id, size, verdicts and key statistics.
std::string summary_csv(std::span<const Report> reports);

/// Rows: PICP verdict; columns: ZMS verdict; order (valid, invalid,
/// untestable).
struct ContingencyTable {
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::array<std::size_t, 3> row_sums{};
  std::array<std::size_t, 3> col_sums{};
  std::size_t total = 0;
  /// Dataset ids per PICP class, sorted.
  std::array<std::vector<std::string>, 3> picp_ids;
  /// Dataset ids per ZMS class, sorted.
  std::array<std::vector<std::string>, 3> zms_ids;

  friend bool operator==(const ContingencyTable &, const ContingencyTable &) = default;
};

ContingencyTable contingency(std::span<const Report> reports);

std::string serialize(const ContingencyTable &table);
std::string contingency_text(const ContingencyTable &table);

} // namespace uqcal
