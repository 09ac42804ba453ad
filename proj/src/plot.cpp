#include "uqcal/plot.hpp"
#include "uqcal/coverage.hpp"
#include "uqcal/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace uqcal {

namespace {

constexpr const char *kBlue = "#1f5fbf";
constexpr const char *kRed = "#d62728";
constexpr const char *kGray = "#8c8c8c";
constexpr const char *kCyan = "#17becf";
constexpr const char *kBand = "#d9d9d9";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

const char *verdict_color(Verdict v) {
  switch (v) {
  case Verdict::Valid:
    return kBlue;
  case Verdict::Invalid:
    return kRed;
  case Verdict::Untestable:
    return kGray;
  }
  return kGray;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = f * mag;
    if (span / step <= 6.0)
      break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (double dec = std::pow(10.0, std::floor(std::log10(lo))); dec <= hi; dec *= 10.0)
    for (double f : {1.0, 2.0, 5.0})
      if (f * dec >= lo * (1 - 1e-12) && f * dec <= hi * (1 + 1e-12))
        ticks.push_back(f * dec);
  return ticks;
}

// Plot frame with data-to-pixel mapping; elements are appended in call order.
class SvgChart {
public:
  SvgChart(std::string title, double x_lo, double x_hi, bool log_x, double y_lo, double y_hi)
      : title_(std::move(title)), x_lo_(x_lo), x_hi_(x_hi), log_x_(log_x), y_lo_(y_lo),
        y_hi_(y_hi) {
    if (!(x_hi > x_lo) || !(y_hi > y_lo))
      throw std::invalid_argument("SvgChart: empty axis range");
  }

  double px(double x) const {
    const double t = log_x_ ? (std::log(x) - std::log(x_lo_)) / (std::log(x_hi_) - std::log(x_lo_))
                            : (x - x_lo_) / (x_hi_ - x_lo_);
    return kLeft + t * kPlotW;
  }
  double py(double y) const { return kTop + (y_hi_ - y) / (y_hi_ - y_lo_) * kPlotH; }

  void hband(double y0, double y1, const char *fill) {
    const double top = py(std::min(y1, y_hi_));
    const double bottom = py(std::max(y0, y_lo_));
    body_ << "<rect class=\"band\" x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\""
          << num(kPlotW) << "\" height=\"" << num(bottom - top) << "\" fill=\"" << fill
          << "\"/>\n";
  }

  void hline(double y, const char *color, bool dashed = true) {
    body_ << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\""
          << num(kLeft + kPlotW) << "\" y2=\"" << num(py(y)) << "\" stroke=\"" << color << "\""
          << (dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
  }

  void vline(double x, const char *color) {
    body_ << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(x))
          << "\" y2=\"" << num(kTop + kPlotH) << "\" stroke=\"" << color
          << "\" stroke-dasharray=\"4,3\"/>\n";
  }

  void polyline(const std::vector<double> &xs, const std::vector<double> &ys, const char *color,
                std::string_view cls = "curve") {
    body_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double y = std::clamp(ys[i], y_lo_, y_hi_);
      body_ << (i ? " " : "") << num(px(xs[i])) << ',' << num(py(y));
    }
    body_ << "\"/>\n";
  }

  void point(double x, double y, const char *color) {
    body_ << "<circle class=\"point\" cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  void errorbar(double x, double lo, double hi, const char *color) {
    const double cx = px(x);
    const double y0 = py(std::clamp(lo, y_lo_, y_hi_));
    const double y1 = py(std::clamp(hi, y_lo_, y_hi_));
    body_ << "<path class=\"errorbar\" stroke=\"" << color << "\" fill=\"none\" d=\"M"
          << num(cx) << ',' << num(y0) << " V" << num(y1) << " M" << num(cx - 3) << ','
          << num(y0) << " H" << num(cx + 3) << " M" << num(cx - 3) << ',' << num(y1) << " H"
          << num(cx + 3) << "\"/>\n";
  }

  void rect(double x0, double x1, double y0, double y1, const char *fill) {
    body_ << "<rect class=\"bar\" x=\"" << num(px(x0)) << "\" y=\"" << num(py(y1))
          << "\" width=\"" << num(px(x1) - px(x0)) << "\" height=\"" << num(py(y0) - py(y1))
          << "\" fill=\"" << fill << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }

  void marker(double x, double y, std::string_view text) {
    body_ << "<path class=\"marker\" stroke=\"" << kRed << "\" d=\"M" << num(px(x) - 5) << ','
          << num(py(y)) << " H" << num(px(x) + 5) << " M" << num(px(x)) << ','
          << num(py(y) - 5) << " V" << num(py(y) + 5) << "\"/>\n";
    text_at(px(x) + 6, py(y) - 6, text, "start");
  }

  void text_at(double x, double y, std::string_view text, std::string_view anchor = "middle") {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
          << "\">" << escape(text) << "</text>\n";
  }

  void margin_note(std::string_view text) { text_at(kLeft + kPlotW + 8, kTop + 12, text, "start"); }

  std::string finish(std::string_view xlabel, std::string_view ylabel) const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kLeft + kPlotW / 2) << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-size=\"13\">" << escape(title_) << "</text>\n";
    out << "<g class=\"data\">\n" << body_.str() << "</g>\n";
    out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
        << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kPlotW)
        << "\" height=\"" << num(kPlotH) << "\"/>\n";
    const auto xt = log_x_ ? log_ticks(x_lo_, x_hi_) : linear_ticks(x_lo_, x_hi_);
    for (double t : xt)
      out << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + kPlotH) << "\" x2=\""
          << num(px(t)) << "\" y2=\"" << num(kTop + kPlotH + 4) << "\"/>\n";
    const auto yt = linear_ticks(y_lo_, y_hi_);
    for (double t : yt)
      out << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\""
          << num(kLeft) << "\" y2=\"" << num(py(t)) << "\"/>\n";
    out << "</g>\n<g class=\"labels\">\n";
    for (double t : xt)
      out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + kPlotH + 16)
          << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
    for (double t : yt)
      out << "<text x=\"" << num(kLeft - 7) << "\" y=\"" << num(py(t) + 4)
          << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
    out << "<text x=\"" << num(kLeft + kPlotW / 2) << "\" y=\"" << num(kHeight - 10)
        << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    out << "<text transform=\"translate(16," << num(kTop + kPlotH / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
  }

private:
  static constexpr double kWidth = 640;
  static constexpr double kHeight = 420;
  static constexpr double kLeft = 70;
  static constexpr double kTop = 36;
  static constexpr double kPlotW = 470;
  static constexpr double kPlotH = 320;

  std::string title_;
  double x_lo_, x_hi_;
  bool log_x_;
  double y_lo_, y_hi_;
  std::ostringstream body_;
};

std::vector<double> curve_grid(const CurveRange &r) {
  if (!(r.nu_min > 2.0) || !(r.nu_max > r.nu_min) || r.points < 2)
    throw std::invalid_argument("render_plot: curve range needs 2 < nu_min < nu_max");
  return log_grid(r.nu_min, r.nu_max, r.points);
}

std::pair<double, double> padded(double lo, double hi, double frac = 0.05) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = (hi - lo) * frac;
  return {lo - pad, hi + pad};
}

std::string k95_curve(const CurveRange &r) {
  const auto nus = curve_grid(r);
  std::vector<double> ks;
  ks.reserve(nus.size());
  for (double nu : nus)
    ks.push_back(k_factor(0.95, nu));
  SvgChart chart("Enlargement factor k95 of t_s(nu)", nus.front(), nus.back(), true,
                 std::max(0.0, *std::min_element(ks.begin(), ks.end()) - 0.05), 2.05);
  chart.hline(kFixedK95, kGray);
  chart.polyline(nus, ks, kBlue);
  const double lo = std::clamp(3.0, r.nu_min, r.nu_max);
  const double nu_max = k95_argmax(lo, r.nu_max);
  chart.marker(nu_max, k_factor(0.95, nu_max),
               "max " + label(std::round(k_factor(0.95, nu_max) * 1000) / 1000) + " at nu=" +
                   label(std::round(nu_max * 100) / 100));
  return chart.finish("nu", "k95");
}

std::string coverage_curves(const CurveRange &r) {
  const auto nus = curve_grid(r);
  SvgChart chart("Coverage of [-a, a] for t_s(nu)", nus.front(), nus.back(), true, 0.6, 1.0);
  const double targets[] = {2 * normal_cdf(1.0) - 1, 0.95, 2 * normal_cdf(2.83) - 1};
  const double as[] = {1.0, kFixedK95, 2.83};
  const char *colors[] = {kRed, kBlue, kCyan};
  for (int i = 0; i < 3; ++i) {
    chart.hband(targets[i] - kBandHalfWidth, targets[i] + kBandHalfWidth, kBand);
    std::vector<double> cov;
    for (double nu : nus)
      cov.push_back(coverage_of_interval(as[i], nu));
    chart.polyline(nus, cov, colors[i]);
    chart.text_at(chart.px(nus.back()) + 4, chart.py(cov.back()) + 4, "a=" + label(as[i]),
                  "start");
  }
  return chart.finish("nu", "coverage probability");
}

std::string coverage_vs_nu(const SweepData &d) {
  if (d.points.empty())
    throw std::invalid_argument("render_plot: empty sweep");
  double lo = d.points.front().nu, hi = lo, ylo = 1.0, yhi = 0.0;
  for (const auto &p : d.points) {
    lo = std::min(lo, p.nu);
    hi = std::max(hi, p.nu);
    ylo = std::min({ylo, p.coverage.ci_low, p.theoretical});
    yhi = std::max({yhi, p.coverage.ci_high, p.theoretical});
  }
  const auto [y0, y1] = padded(std::min(ylo, 0.94), std::max(yhi, 0.96));
  const auto [x0, x1] = std::pair{lo * 0.95, hi * 1.05};
  SvgChart chart("PICP95 of t_s(nu) samples", x0, x1, true, y0, y1);
  chart.hband(0.95 - kBandHalfWidth, 0.95 + kBandHalfWidth, kBand);
  std::vector<double> nus = log_grid(std::max(lo, 2.0001), hi, 300), th;
  for (double nu : nus)
    th.push_back(coverage_of_interval(kFixedK95, nu));
  chart.polyline(nus, th, kCyan, "theory");
  for (const auto &p : d.points) {
    const char *c = verdict_color(p.coverage.verdict);
    chart.errorbar(p.nu, p.coverage.ci_low, p.coverage.ci_high, c);
    chart.point(p.nu, p.coverage.picp, c);
  }
  return chart.finish("nu", "PICP95");
}

std::string picp_vs_skew(const SweepData &d) {
  if (d.points.empty())
    throw std::invalid_argument("render_plot: empty sweep");
  double xlo = kPicpSkewThreshold, xhi = kPicpSkewThreshold, ylo = 0.94, yhi = 0.96;
  for (const auto &p : d.points) {
    if (!p.beta_gm_z2)
      continue;
    xlo = std::min(xlo, *p.beta_gm_z2);
    xhi = std::max(xhi, *p.beta_gm_z2);
    ylo = std::min(ylo, p.coverage.ci_low);
    yhi = std::max(yhi, p.coverage.ci_high);
  }
  const auto [x0, x1] = padded(xlo, xhi);
  const auto [y0, y1] = padded(ylo, yhi);
  SvgChart chart("PICP95 vs skewness of Z^2", x0, x1, false, y0, y1);
  chart.hband(0.95 - kBandHalfWidth, 0.95 + kBandHalfWidth, kBand);
  chart.vline(kPicpSkewThreshold, kGray);
  for (const auto &p : d.points) {
    if (!p.beta_gm_z2)
      continue;
    const char *c = verdict_color(p.coverage.verdict);
    chart.errorbar(*p.beta_gm_z2, p.coverage.ci_low, p.coverage.ci_high, c);
    chart.point(*p.beta_gm_z2, p.coverage.picp, c);
  }
  return chart.finish("beta_GM(Z^2)", "PICP95");
}

std::string lcp_panel(const Report &r) {
  if (!r.lcp)
    throw std::invalid_argument("render_plot: lcp_panel needs a report with an LCP result");
  const LcpResult &lcp = *r.lcp;
  double ylo = 0.94, yhi = 0.96;
  for (const auto &b : lcp.bins) {
    ylo = std::min(ylo, b.coverage.ci_low);
    yhi = std::max(yhi, b.coverage.ci_high);
  }
  const auto [y0, y1] = padded(ylo, yhi);
  SvgChart chart("Local PICP95: " + r.dataset_id, 0.5,
                 static_cast<double>(lcp.bins.size()) + 0.5, false, y0, y1);
  chart.hband(0.95 - kBandHalfWidth, 0.95 + kBandHalfWidth, kBand);
  for (const auto &b : lcp.bins) {
    const double x = static_cast<double>(b.index + 1);
    const char *c = verdict_color(b.coverage.verdict);
    chart.errorbar(x, b.coverage.ci_low, b.coverage.ci_high, c);
    chart.point(x, b.coverage.picp, c);
  }
  char note[64];
  std::snprintf(note, sizeof note, "PICP = %.3f", lcp.overall.picp);
  chart.margin_note(note);
  return chart.finish("uncertainty bin (ascending uE)", "local PICP95");
}

std::string fit_density(const FitPlotData &d) {
  if (d.z2.empty())
    throw std::invalid_argument("render_plot: empty sample");
  std::vector<double> s = d.z2;
  std::sort(s.begin(), s.end());
  const double cut = s[static_cast<std::size_t>(0.99 * static_cast<double>(s.size() - 1))];
  const double hi = cut > 0.0 ? cut : 1.0;
  constexpr std::size_t kBins = 40;
  const double width = hi / kBins;
  std::vector<double> dens(kBins, 0.0);
  for (double v : s)
    if (v < hi)
      dens[std::min(kBins - 1, static_cast<std::size_t>(v / width))] += 1.0;
  const double norm = static_cast<double>(s.size()) * width;
  for (auto &v : dens)
    v /= norm;

  const ScaledF dist({d.fit.nu, d.fit.scale});
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i <= 300; ++i) {
    const double x = hi * static_cast<double>(i) / 300.0;
    xs.push_back(x);
    ys.push_back(dist.pdf(x));
  }
  const double ymax = std::max(*std::max_element(dens.begin(), dens.end()), dens.front()) * 1.1;
  std::string title = d.title.empty() ? std::string("Z^2") : d.title;
  title += "  nu=" + label(std::round(d.fit.nu));
  SvgChart chart(title, 0.0, hi, false, 0.0, ymax > 0.0 ? ymax : 1.0);
  for (std::size_t i = 0; i < kBins; ++i)
    chart.rect(width * static_cast<double>(i), width * static_cast<double>(i + 1), 0.0,
               std::min(dens[i], ymax), kBand);
  chart.polyline(xs, ys, kBlue);
  return chart.finish("Z^2", "density");
}

} // namespace

std::string_view to_string(PlotKind kind) {
  switch (kind) {
  case PlotKind::K95Curve:
    return "k95_curve";
  case PlotKind::CoverageCurve:
    return "coverage_curve";
  case PlotKind::PicpVsSkew:
    return "picp_vs_skew";
  case PlotKind::LcpPanel:
    return "lcp_panel";
  case PlotKind::FitDensity:
    return "fit_density";
  }
  return "unknown";
}

std::optional<PlotKind> plot_kind_from_string(std::string_view s) {
  for (PlotKind k : {PlotKind::K95Curve, PlotKind::CoverageCurve, PlotKind::PicpVsSkew,
                     PlotKind::LcpPanel, PlotKind::FitDensity})
    if (to_string(k) == s)
      return k;
  return std::nullopt;
}

double k95_argmax(double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = k_factor(0.95, c), fd = k_factor(0.95, d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = k_factor(0.95, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = k_factor(0.95, d);
    }
  }
  return 0.5 * (a + b);
}

std::string render_plot(PlotKind kind, const PlotInput &input) {
  const auto mismatch = [&] {
    return std::invalid_argument("render_plot: input does not match kind " +
                                 std::string(to_string(kind)));
  };
  switch (kind) {
  case PlotKind::K95Curve:
    if (const auto *r = std::get_if<CurveRange>(&input))
      return k95_curve(*r);
    throw mismatch();
  case PlotKind::CoverageCurve:
    if (const auto *r = std::get_if<CurveRange>(&input))
      return coverage_curves(*r);
    if (const auto *d = std::get_if<SweepData>(&input))
      return coverage_vs_nu(*d);
    throw mismatch();
  case PlotKind::PicpVsSkew:
    if (const auto *d = std::get_if<SweepData>(&input))
      return picp_vs_skew(*d);
    throw mismatch();
  case PlotKind::LcpPanel:
    if (const auto *r = std::get_if<Report>(&input))
      return lcp_panel(*r);
    throw mismatch();
  case PlotKind::FitDensity:
    if (const auto *d = std::get_if<FitPlotData>(&input))
      return fit_density(*d);
    throw mismatch();
  }
  throw mismatch();
}

} // namespace uqcal
