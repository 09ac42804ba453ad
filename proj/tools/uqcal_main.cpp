// uqcal: calibration checks for regression uncertainties.
//
// Exit codes: 0 ok, 1 usage or internal error, 2 data error,
// 3 (--strict) some binding verdict Invalid, 4 (--strict) some Untestable.

#include <uqcal/dataset.hpp>
#include <uqcal/plot.hpp>
#include <uqcal/report.hpp>
#include <uqcal/version.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace uqcal;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitUntestable = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::size_t boot = 5000;
  double level = kDefaultCiLevel;
  std::size_t bins = kDefaultLcpBins;
  bool strict = false;
  std::string format = "json";
  std::string out;
  std::string svg;
};

void add_common(CLI::App *cmd, Common &c, bool with_bins = true) {
  cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_option("--boot", c.boot, "Bootstrap resamples for the ZMS interval")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{100}, std::size_t{10'000'000}));
  cmd->add_option("--level", c.level, "Confidence level of the reported intervals")
      ->capture_default_str()
      ->check(CLI::Range(0.5, 0.9999));
  if (with_bins)
    cmd->add_option("--bins", c.bins, "Number of uncertainty bins for LCP")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{100'000}));
  cmd->add_flag("--strict", c.strict, "Exit 3 on any Invalid, 4 on any Untestable verdict");
}

void write_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit(const std::string &out, const std::string &text) {
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load(const std::string &path) {
  try {
    return load_dataset(path);
  } catch (const DatasetError &e) {
    throw DataError(path + ": " + e.what());
  }
}

Report run_analysis(const Dataset &ds, const AnalysisConfig &cfg) {
  try {
    return analyze(ds, cfg);
  } catch (const std::exception &e) {
    throw DataError(e.what());
  }
}

AnalysisConfig config_from(const Common &c) {
  AnalysisConfig cfg;
  cfg.seed = c.seed;
  cfg.n_boot = c.boot;
  cfg.level = c.level;
  cfg.lcp_bins = c.bins;
  return cfg;
}

int strict_code(const std::vector<Verdict> &verdicts) {
  if (std::ranges::find(verdicts, Verdict::Untestable) != verdicts.end())
    return kExitUntestable;
  if (std::ranges::find(verdicts, Verdict::Invalid) != verdicts.end())
    return kExitInvalid;
  return 0;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string reports_json(const std::vector<Report> &reports) {
  if (reports.size() == 1)
    return serialize(reports.front());
  std::string out = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += serialize(reports[i]);
    if (i + 1 < reports.size())
      out.insert(out.size() - 1, ",");
  }
  return out + "]\n";
}

std::string lcp_csv(const LcpResult &lcp) {
  std::string out = "bin,ue_low,ue_high,m,hits,picp,ci_low,ci_high,beta_gm_z2,verdict\n";
  for (const auto &b : lcp.bins) {
    const auto &c = b.coverage;
    out += std::to_string(b.index + 1) + ',' + fmt(b.ue_low) + ',' + fmt(b.ue_high) + ',' +
           std::to_string(c.m) + ',' + std::to_string(c.hits) + ',' + fmt(c.picp) + ',' +
           fmt(c.ci_low) + ',' + fmt(c.ci_high) + ',' +
           (c.beta_gm_z2 ? fmt(*c.beta_gm_z2) : std::string()) + ',' +
           std::string(to_string(c.verdict)) + '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SimPoint> &pts) {
  std::string out = "nu,beta_gm_z2,picp,ci_low,ci_high,theoretical,verdict\n";
  for (const auto &p : pts)
    out += fmt(p.nu) + ',' + (p.beta_gm_z2 ? fmt(*p.beta_gm_z2) : std::string()) + ',' +
           fmt(p.coverage.picp) + ',' + fmt(p.coverage.ci_low) + ',' + fmt(p.coverage.ci_high) +
           ',' + fmt(p.theoretical) + ',' + std::string(to_string(p.coverage.verdict)) + '\n';
  return out;
}

std::string fit_csv(const Report &r) {
  const FitResult &f = *r.fit;
  return "id,m,nu,scale,ks,ks_crit_01,converged,unit_mean,reliable\n" + r.dataset_id + ',' +
         std::to_string(r.m) + ',' + fmt(f.nu) + ',' + fmt(f.scale) + ',' + fmt(f.ks) + ',' +
         fmt(ks_critical_value(r.m, 0.01)) + ',' + (f.converged ? "true" : "false") + ',' +
         (f.unit_mean ? "true" : "false") + ',' + (f.reliable ? "true" : "false") + '\n';
}

// "lo:hi:n" (log-spaced) or a comma-separated list.
std::vector<double> parse_grid(const std::string &spec) {
  if (spec.empty())
    return default_nu_grid();
  const auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw CLI::ValidationError("--grid", "cannot parse '" + std::string(s) + "'");
    return v;
  };
  std::vector<std::string_view> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::string_view rest = spec;
  for (;;) {
    const auto pos = rest.find(sep);
    parts.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos)
      break;
    rest.remove_prefix(pos + 1);
  }
  if (sep == ':') {
    if (parts.size() != 3)
      throw CLI::ValidationError("--grid", "expected lo:hi:n");
    const double n = number(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n))
      throw CLI::ValidationError("--grid", "n must be a positive integer");
    return log_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(n));
  }
  std::vector<double> grid;
  for (auto p : parts)
    grid.push_back(number(p));
  return grid;
}

int cmd_validate(const std::vector<std::string> &files, const Common &c, bool fit,
                 bool unit_mean, bool no_lcp) {
  AnalysisConfig cfg = config_from(c);
  cfg.run_lcp = !no_lcp;
  cfg.run_fit = fit;
  cfg.fit_unit_mean = unit_mean;

  std::vector<Report> reports;
  std::vector<std::vector<double>> z2s;
  for (const auto &f : files) {
    const Dataset ds = load(f);
    reports.push_back(run_analysis(ds, cfg));
    if (fit && !c.svg.empty())
      z2s.push_back(ds.z().squared());
  }

  if (c.format == "csv") {
    emit(c.out.empty() ? "" : (fs::path(c.out) / "summary.csv").string(), summary_csv(reports));
  } else if (c.out.empty()) {
    std::cout << reports_json(reports);
  } else {
    for (const auto &r : reports)
      write_file(fs::path(c.out) / (r.dataset_id + ".json"), serialize(r));
    std::cout << summary_csv(reports);
  }

  if (!c.svg.empty()) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto &r = reports[i];
      if (r.lcp)
        write_file(fs::path(c.svg) / (r.dataset_id + "_lcp.svg"),
                   render_plot(PlotKind::LcpPanel, r));
      if (r.fit)
        write_file(fs::path(c.svg) / (r.dataset_id + "_fit.svg"),
                   render_plot(PlotKind::FitDensity, FitPlotData{r.dataset_id, z2s[i], *r.fit}));
    }
  }

  if (!c.strict)
    return 0;
  std::vector<Verdict> v;
  for (const auto &r : reports)
    v.push_back(r.picp_2sigma.verdict);
  return strict_code(v);
}

int cmd_lcp(const std::string &file, const Common &c) {
  const Dataset ds = load(file);
  if (ds.size() < c.bins)
    throw DataError(file + ": " + std::to_string(ds.size()) + " points for " +
                    std::to_string(c.bins) + " bins");
  const Report r = run_analysis(ds, config_from(c));
  emit(c.out, c.format == "csv" ? lcp_csv(*r.lcp) : serialize(r));
  if (!c.svg.empty())
    write_file(c.svg, render_plot(PlotKind::LcpPanel, r));
  if (!c.strict)
    return 0;
  std::vector<Verdict> v;
  for (const auto &b : r.lcp->bins)
    v.push_back(b.coverage.verdict);
  return strict_code(v);
}

int cmd_fit(const std::string &file, const Common &c, bool unit_mean) {
  const Dataset ds = load(file);
  AnalysisConfig cfg = config_from(c);
  cfg.run_lcp = false;
  cfg.run_fit = true;
  cfg.fit_unit_mean = unit_mean;
  const Report r = run_analysis(ds, cfg);
  emit(c.out, c.format == "csv" ? fit_csv(r) : serialize(r));
  if (!c.svg.empty())
    write_file(c.svg,
               render_plot(PlotKind::FitDensity, FitPlotData{r.dataset_id, ds.z().squared(), *r.fit}));
  return 0;
}

int cmd_simulate(std::size_t m, const std::string &grid_spec, const Common &c) {
  const auto grid = parse_grid(grid_spec);
  for (double nu : grid)
    if (!(nu > 2.0))
      throw CLI::ValidationError("--grid", "values must exceed 2");
  const auto pts = sweep(grid, m, c.seed, c.level);
  emit(c.out, c.format == "csv" ? sweep_csv(pts) : serialize(pts, m, c.seed));
  if (!c.svg.empty()) {
    const SweepData d{pts};
    write_file(fs::path(c.svg) / "coverage_curve.svg", render_plot(PlotKind::CoverageCurve, d));
    write_file(fs::path(c.svg) / "picp_vs_skew.svg", render_plot(PlotKind::PicpVsSkew, d));
  }
  if (!c.strict)
    return 0;
  std::vector<Verdict> v;
  for (const auto &p : pts)
    v.push_back(p.coverage.verdict);
  return strict_code(v);
}

int cmd_compare(const std::string &dir, const std::string &format, const std::string &out) {
  if (!fs::is_directory(dir))
    throw DataError(dir + " is not a directory");
  std::vector<fs::path> paths;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<Report> reports;
  for (const auto &p : paths) {
    try {
      reports.push_back(deserialize_report(read_file(p)));
    } catch (const DataError &) {
      throw;
    } catch (const std::exception &e) {
      throw DataError(p.string() + ": not a report: " + e.what());
    }
  }
  if (reports.empty())
    throw DataError("no reports in " + dir);
  const ContingencyTable t = contingency(reports);
  if (format == "json") {
    emit(out, serialize(t));
  } else if (format == "csv") {
    std::string csv = "picp\\zms,valid,invalid,untestable,sum\n";
    const char *names[] = {"valid", "invalid", "untestable"};
    for (std::size_t i = 0; i < 3; ++i)
      csv += std::string(names[i]) + ',' + std::to_string(t.counts[i][0]) + ',' +
             std::to_string(t.counts[i][1]) + ',' + std::to_string(t.counts[i][2]) + ',' +
             std::to_string(t.row_sums[i]) + '\n';
    csv += "sum," + std::to_string(t.col_sums[0]) + ',' + std::to_string(t.col_sums[1]) + ',' +
           std::to_string(t.col_sums[2]) + ',' + std::to_string(t.total) + '\n';
    emit(out, csv);
  } else {
    emit(out, contingency_text(t));
  }
  return 0;
}

int cmd_plot(const std::string &kind_name, const std::string &input, const std::string &out,
             const CurveRange &range, bool unit_mean) {
  const auto kind = plot_kind_from_string(kind_name);
  if (!kind)
    throw CLI::ValidationError("--kind", "unknown plot kind '" + kind_name + "'");

  PlotInput data = range;
  switch (*kind) {
  case PlotKind::K95Curve:
    break;
  case PlotKind::CoverageCurve:
  case PlotKind::PicpVsSkew:
    if (!input.empty()) {
      try {
        data = SweepData{deserialize_sweep(read_file(input))};
      } catch (const DataError &) {
        throw;
      } catch (const std::exception &e) {
        throw DataError(input + ": " + e.what());
      }
    } else if (*kind == PlotKind::PicpVsSkew) {
      throw CLI::ValidationError("--input", "picp_vs_skew needs a sweep JSON");
    }
    break;
  case PlotKind::LcpPanel:
    if (input.empty())
      throw CLI::ValidationError("--input", "lcp_panel needs a report JSON");
    try {
      data = deserialize_report(read_file(input));
    } catch (const DataError &) {
      throw;
    } catch (const std::exception &e) {
      throw DataError(input + ": " + e.what());
    }
    if (!std::get<Report>(data).lcp)
      throw DataError(input + ": report has no LCP result");
    break;
  case PlotKind::FitDensity: {
    if (input.empty())
      throw CLI::ValidationError("--input", "fit_density needs a dataset CSV");
    const Dataset ds = load(input);
    FitOptions fo;
    fo.unit_mean = unit_mean;
    const auto z2 = ds.z().squared();
    data = FitPlotData{ds.id, z2, fit_scaled_f(z2, fo)};
    break;
  }
  }
  emit(out, render_plot(*kind, data));
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Calibration validation of regression uncertainties (PICP, ZMS, LCP)", "uqcal"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> files;
  std::string file;
  bool fit = false, unit_mean = false, no_lcp = false;

  auto *validate = app.add_subcommand("validate", "Analyze datasets and report verdicts");
  validate->add_option("files", files, "Dataset CSV files")->required();
  add_common(validate, common);
  validate->add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  validate->add_option("--out", common.out, "Directory for per-dataset reports");
  validate->add_option("--svg", common.svg, "Directory for LCP (and fit) plots");
  validate->add_flag("--fit", fit, "Also fit a scaled F(1, nu) to Z^2");
  validate->add_flag("--unit-mean", unit_mean, "Constrain the fit to mean 1");
  validate->add_flag("--no-lcp", no_lcp, "Skip the binned LCP analysis");

  auto *lcp = app.add_subcommand("lcp", "Local coverage over uncertainty bins");
  lcp->add_option("file", file, "Dataset CSV")->required();
  add_common(lcp, common);
  lcp->add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  lcp->add_option("--out", common.out, "Output file (default stdout)");
  lcp->add_option("--svg", common.svg, "SVG file for the LCP panel");

  auto *fitc = app.add_subcommand("fit", "Fit scale * F(1, nu) to Z^2 by KS distance");
  fitc->add_option("file", file, "Dataset CSV")->required();
  add_common(fitc, common, false);
  fitc->add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  fitc->add_option("--out", common.out, "Output file (default stdout)");
  fitc->add_option("--svg", common.svg, "SVG file for the density overlay");
  fitc->add_flag("--unit-mean", unit_mean, "Constrain the fit to mean 1");

  std::size_t sim_m = 10'000;
  std::string grid;
  auto *simulate = app.add_subcommand("simulate", "PICP95 of synthetic t_s(nu) samples");
  simulate->add_option("--m", sim_m, "Sample size per grid point")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{100}, std::size_t{100'000'000}));
  simulate->add_option("--grid", grid, "lo:hi:n (log-spaced) or a list 2.2,3,10");
  add_common(simulate, common, false);
  simulate->add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--out", common.out, "Output file (default stdout)");
  simulate->add_option("--svg", common.svg, "Directory for the sweep plots");

  std::string report_dir, compare_format = "text";
  auto *compare = app.add_subcommand("compare", "Contingency table of PICP vs ZMS verdicts");
  compare->add_option("dir", report_dir, "Directory of report JSON files")->required();
  compare->add_option("--format", compare_format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  compare->add_option("--out", common.out, "Output file (default stdout)");

  std::string kind, input;
  CurveRange range;
  auto *plot = app.add_subcommand("plot", "Render an SVG chart");
  plot->add_option("--kind", kind,
                   "k95_curve, coverage_curve, picp_vs_skew, lcp_panel or fit_density")
      ->required();
  plot->add_option("--input", input, "Sweep JSON, report JSON or dataset CSV, per kind");
  plot->add_option("--out", common.out, "Output file (default stdout)");
  plot->add_option("--nu-min", range.nu_min, "Curve range")->capture_default_str();
  plot->add_option("--nu-max", range.nu_max, "Curve range")->capture_default_str();
  plot->add_option("--points", range.points, "Curve resolution")->capture_default_str();
  plot->add_flag("--unit-mean", unit_mean, "fit_density: constrain the fit to mean 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate)
      return cmd_validate(files, common, fit, unit_mean, no_lcp);
    if (*lcp)
      return cmd_lcp(file, common);
    if (*fitc)
      return cmd_fit(file, common, unit_mean);
    if (*simulate)
      return cmd_simulate(sim_m, grid, common);
    if (*compare)
      return cmd_compare(report_dir, compare_format, common.out);
    if (*plot)
      return cmd_plot(kind, input, common.out, range, unit_mean);
  } catch (const CLI::Error &e) {
    std::cerr << "uqcal: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError &e) {
    std::cerr << "uqcal: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "uqcal: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
