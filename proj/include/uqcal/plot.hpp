#pragma once

// Self-contained SVG charts. Output is byte-deterministic: no timestamps,
// fixed-precision coordinates.

#include "uqcal/fitting.hpp"
#include "uqcal/report.hpp"
#include "uqcal/simulation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace uqcal {

enum class PlotKind { K95Curve, CoverageCurve, PicpVsSkew, LcpPanel, FitDensity };

std::string_view to_string(PlotKind kind);
std::optional<PlotKind> plot_kind_from_string(std::string_view s);

/// Theoretical curves over nu, log-spaced.
struct CurveRange {
  double nu_min = 2.05;
  double nu_max = 100.0;
  std::size_t points = 400;
};

struct SweepData {
  std::vector<SimPoint> points;
};

struct FitPlotData {
  std::string title;
  std::vector<double> z2;
  FitResult fit;
};

using PlotInput = std::variant<CurveRange, SweepData, Report, FitPlotData>;

/// Accepted inputs per kind:
///   k95_curve      CurveRange
///   coverage_curve CurveRange (a = 1, 1.96, 2.83) or SweepData (PICP vs nu)
///   picp_vs_skew   SweepData
///   lcp_panel      Report with an LCP result
///   fit_density    FitPlotData
/// Throws std::invalid_argument on a mismatched input.
std::string render_plot(PlotKind kind, const PlotInput &input);

/// nu maximizing k_factor(0.95, nu) on [lo, hi] (golden-section search).
double k95_argmax(double lo = 3.0, double hi = 100.0);

} // namespace uqcal
