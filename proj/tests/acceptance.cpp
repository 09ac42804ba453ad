// Acceptance checks, one line per criterion.
//
//   uqcal_acceptance [--cli PATH] [--reference DIR]
//
// DIR (or $UQCAL_REFERENCE_DIR) holds the 33 reference CSVs; the set number is
// the integer in each file name. Without it criterion 7 is skipped.

#include "synthetic.hpp"

#include <uqcal/plot.hpp>
#include <uqcal/report.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace uqcal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  enum class State { Pass, Fail, Skip } state = State::Pass;
  std::vector<std::string> notes;

  void check(bool ok, const std::string &what) {
    notes.push_back((ok ? "" : "!") + what);
    if (!ok)
      state = State::Fail;
  }
  void info(const std::string &what) { notes.push_back("(" + what + ")"); }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---- 1: k95 curve

Outcome k95_curve() {
  Outcome o;
  const auto t0 = Clock::now();
  double lo = 1e300, hi = -1e300, arg = 0.0, lo_from_305 = 1e300, hi_from_305 = -1e300;
  for (int i = 1; i <= 19'600; ++i) {
    const double nu = 2.0 + i * 0.005;
    const double k = k_factor(0.95, nu);
    lo = std::min(lo, k);
    if (k > hi) {
      hi = k;
      arg = nu;
    }
    if (nu >= 3.05) {
      lo_from_305 = std::min(lo_from_305, k);
      hi_from_305 = std::max(hi_from_305, k);
    }
  }
  const double k33 = k_factor(0.95, 3.3);
  const double elapsed = seconds_since(t0);

  o.check(lo >= 1.85 && hi <= 2.00,
          "range over (2,100] = [" + num(lo) + ", " + num(hi) + "] within [1.85, 2.00]");
  o.check(std::fabs(arg - 6.7) <= 0.3, "argmax nu = " + num(arg, 4) + " (6.7 +- 0.3)");
  o.check(std::fabs(hi - 2.00) <= 0.01, "max = " + num(hi) + " (2.00 +- 0.01)");
  o.check(std::fabs(k33 - 1.90) <= 0.005, "k95(3.3) = " + num(k33) + " (1.90 +- 0.005)");
  o.check(elapsed < 1.0, "runtime " + num(elapsed, 3) + " s (< 1 s)");
  o.info("range over [3.05,100] = [" + num(lo_from_305) + ", " + num(hi_from_305) + "]");
  return o;
}

// ---- 2: coverage curve

Outcome coverage_curve() {
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i <= 96'400; ++i) {
    const double nu = 3.6 + i * 0.001;
    worst = std::max(worst, std::fabs(coverage_of_interval(kFixedK95, nu) - 0.95));
  }
  o.check(worst <= 0.005, "max |cov - 0.95| on [3.6,100] = " + num(worst, 4) + " (<= 0.005)");

  const double nu_star = coverage_threshold_nu();
  o.check(nu_star >= 3.0 && nu_star <= 3.6, "nu* = " + num(nu_star, 5) + " in [3.0, 3.6]");

  double round_trip = 0.0;
  for (double p : {0.67, 0.95, 0.995})
    for (double nu : {3.0, 5.0, 10.0, 100.0})
      round_trip = std::max(round_trip, std::fabs(coverage_of_interval(k_factor(p, nu), nu) - p));
  o.check(round_trip <= 1e-9, "round trip error " + num(round_trip, 3) + " (<= 1e-9)");
  return o;
}

// ---- 3: simulation

Outcome simulation() {
  Outcome o;
  const auto grid = default_nu_grid();
  const auto t0 = Clock::now();
  std::size_t low_bad = 0, low_total = 0, high_valid = 0, high_total = 0, contain = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const auto &p : sweep(grid, 10'000, seed)) {
      const Verdict v = p.coverage.verdict;
      if (p.nu <= 2.5) {
        ++low_total;
        low_bad += v == Verdict::Untestable || v == Verdict::Invalid;
      }
      if (p.nu >= 6.0) {
        ++high_total;
        high_valid += v == Verdict::Valid;
      }
      ++total;
      contain += p.coverage.ci_low <= p.theoretical && p.theoretical <= p.coverage.ci_high;
    }
  }
  const double elapsed = seconds_since(t0);
  const double frac = static_cast<double>(contain) / static_cast<double>(total);

  o.check(grid.size() == 40, std::to_string(grid.size()) + " grid points");
  o.check(low_bad == low_total, "nu <= 2.5 Untestable/Invalid " + std::to_string(low_bad) + "/" +
                                    std::to_string(low_total));
  o.check(high_valid == high_total, "nu >= 6 Valid " + std::to_string(high_valid) + "/" +
                                        std::to_string(high_total));
  o.check(frac >= 0.90, "CI contains theory " + num(100 * frac, 4) + "% (>= 90%)");
  o.check(elapsed < 30.0, "runtime " + num(elapsed, 3) + " s for 5 seeds (< 30 s)");
  return o;
}

// ---- 4: fit recovery

Outcome fit_recovery() {
  Outcome o;
  struct Band {
    double nu, lo, hi;
  };
  const double crit = ks_critical_value(10'000, 0.01);
  for (const Band b : {Band{3.0, 2.5, 4.0}, Band{10.0, 8.0, 13.0}, Band{50.0, 30.0, 100.0}}) {
    std::size_t inside = 0, below = 0;
    std::string fitted;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto z2 = sample_ts(b.nu, 10'000, derive_seed(4000, seed)).squared();
      const FitResult f = fit_scaled_f(z2);
      inside += f.nu >= b.lo && f.nu <= b.hi;
      below += f.ks < crit;
      fitted += (fitted.empty() ? "" : " ") + num(f.nu, 4);
    }
    o.check(inside == 5, "nu=" + num(b.nu) + ": " + std::to_string(inside) + "/5 in [" +
                             num(b.lo) + "," + num(b.hi) + "] {" + fitted + "}");
    o.check(below == 5, "nu=" + num(b.nu) + ": KS < " + num(crit, 4) + " " +
                            std::to_string(below) + "/5");
  }
  return o;
}

// ---- 5: Wilson interval calibration

Outcome wilson_calibration() {
  Outcome o;
  constexpr std::size_t n = 1000, replicates = 10'000;
  Rng rng(5005);
  std::size_t covered = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
      hits += rng.uniform() < 0.95;
    const Interval ci = wilson_ci(hits, n, 0.95);
    covered += ci.low <= 0.95 && 0.95 <= ci.high;
  }
  const double frac = static_cast<double>(covered) / replicates;
  o.check(frac >= 0.94, "coverage " + num(100 * frac, 4) + "% (>= 94%)");
  const Interval none = wilson_ci(0, n, 0.95), all = wilson_ci(n, n, 0.95);
  o.check(none.low == 0.0, "hits=0 low = " + num(none.low));
  o.check(all.high == 1.0, "hits=n high = " + num(all.high));
  return o;
}

// ---- 6: synthetic end-to-end verdicts

Outcome synthetic_verdicts() {
  Outcome o;
  AnalysisConfig cfg;
  cfg.seed = 6006;
  const auto good = analyze(synth::make("calibrated", 10'000, 61), cfg);
  const auto wide = analyze(synth::make("overdispersed", 10'000, 62, 2.0), cfg);
  const auto heavy = analyze(synth::make("heavy", 10'000, 63, 1.0, 2.3), cfg);
  const auto name = [](Verdict v) { return std::string(to_string(v)); };

  o.check(good.picp_2sigma.verdict == Verdict::Valid && good.zms.verdict == Verdict::Valid,
          "calibrated PICP " + name(good.picp_2sigma.verdict) + ", ZMS " + name(good.zms.verdict));
  o.check(wide.picp_2sigma.verdict == Verdict::Invalid && wide.zms.verdict == Verdict::Invalid,
          "2x PICP " + name(wide.picp_2sigma.verdict) + ", ZMS " + name(wide.zms.verdict));
  o.check(std::fabs(wide.picp_2sigma.picp - 0.673) <= 0.01,
          "2x PICP = " + num(wide.picp_2sigma.picp, 4) + " (0.673 +- 0.01)");
  o.check(heavy.picp_2sigma.verdict == Verdict::Untestable &&
              heavy.zms.verdict == Verdict::Untestable,
          "t_s(2.3) PICP " + name(heavy.picp_2sigma.verdict) + ", ZMS " + name(heavy.zms.verdict));
  return o;
}

// ---- 7: reference contingency table

std::set<int> set_numbers(const std::vector<std::string> &ids) {
  std::set<int> out;
  for (const auto &id : ids) {
    const auto b = id.find_first_of("0123456789");
    out.insert(b == std::string::npos ? -1 : std::stoi(id.substr(b)));
  }
  return out;
}

Outcome reference_table(const std::string &dir) {
  Outcome o;
  if (dir.empty() || !fs::is_directory(dir)) {
    o.state = Outcome::State::Skip;
    o.info("reference datasets not supplied");
    return o;
  }
  std::vector<fs::path> paths;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());

  std::vector<Report> reports;
  for (const auto &p : paths)
    reports.push_back(analyze(load_dataset(p), AnalysisConfig{}));
  o.check(reports.size() == 33, std::to_string(reports.size()) + " datasets (33)");
  const ContingencyTable t = contingency(reports);

  const auto triple = [](const std::array<std::size_t, 3> &a) {
    return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]) +
           ")";
  };
  o.check(t.row_sums == std::array<std::size_t, 3>{18, 5, 10},
          "PICP " + triple(t.row_sums) + " (18,5,10)");
  o.check(t.col_sums == std::array<std::size_t, 3>{13, 4, 16},
          "ZMS " + triple(t.col_sums) + " (13,4,16)");
  const bool cells = t.counts[0] == std::array<std::size_t, 3>{11, 2, 5} &&
                     t.counts[1] == std::array<std::size_t, 3>{2, 2, 1} &&
                     t.counts[2] == std::array<std::size_t, 3>{0, 0, 10};
  o.check(cells, "cells " + triple(t.counts[0]) + " / " + triple(t.counts[1]) + " / " +
                     triple(t.counts[2]));
  o.check(set_numbers(t.picp_ids[2]) == std::set<int>{1, 7, 8, 12, 13, 14, 18, 22, 31, 33},
          "PICP-untestable sets");
  o.check(set_numbers(t.picp_ids[1]) == std::set<int>{5, 16, 21, 24, 32}, "PICP-invalid sets");
  double max_invalid = 0.0;
  for (const auto &r : reports)
    if (r.picp_2sigma.verdict == Verdict::Invalid)
      max_invalid = std::max(max_invalid, r.picp_2sigma.picp);
  o.check(max_invalid <= 0.97, "max PICP of invalid sets " + num(max_invalid, 4) + " (<= 0.97)");
  return o;
}

// ---- 8: LCP structure

Outcome lcp_structure() {
  Outcome o;
  const Dataset ds = synth::make("lcp", 10'000, 88);
  const LcpResult lcp = lcp_analysis(ds.errors, ds.uncertainties, 20);
  std::size_t valid = 0, hits = 0, points = 0, smallest = ds.size(), largest = 0;
  std::vector<bool> seen(ds.size(), false);
  bool disjoint = true;
  for (const auto &b : lcp.bins) {
    valid += b.coverage.verdict == Verdict::Valid;
    hits += b.coverage.hits;
    points += b.coverage.m;
    smallest = std::min(smallest, b.coverage.m);
    largest = std::max(largest, b.coverage.m);
  }
  for (const auto &group : bin_by_uncertainty(ds.uncertainties, 20))
    for (std::size_t i : group) {
      disjoint = disjoint && !seen[i];
      seen[i] = true;
    }
  const bool covers = std::ranges::all_of(seen, [](bool s) { return s; });

  o.check(lcp.bins.size() == 20, std::to_string(lcp.bins.size()) + " bins");
  o.check(valid >= 18, std::to_string(valid) + "/20 Valid (>= 18)");
  o.check(disjoint && covers && points == ds.size(), "bins partition the data");
  o.check(largest - smallest <= 1,
          "sizes " + std::to_string(smallest) + ".." + std::to_string(largest));
  o.check(hits == lcp.overall.hits,
          "hits " + std::to_string(hits) + " = overall " + std::to_string(lcp.overall.hits));
  return o;
}

// ---- 9: determinism

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string &cli) {
  Outcome o;
  AnalysisConfig cfg;
  cfg.seed = 9009;
  cfg.n_boot = 1000;
  cfg.run_fit = true;
  const auto once = [&] {
    const Report r = analyze(synth::make("repeat", 3000, 99, 1.1, 5.0), cfg);
    const auto pts = sweep(log_grid(2.2, 50.0, 8), 2000, 9);
    return serialize(r) + serialize(pts, 2000, 9) + render_plot(PlotKind::LcpPanel, r) +
           render_plot(PlotKind::PicpVsSkew, SweepData{pts}) +
           render_plot(PlotKind::K95Curve, CurveRange{});
  };
  o.check(once() == once(), "library reports and plots identical");

  if (cli.empty()) {
    o.info("CLI not given");
    return o;
  }
  const fs::path work = fs::temp_directory_path() / "uqcal_acceptance_9";
  fs::remove_all(work);
  fs::create_directories(work);
  {
    const Dataset ds = synth::make("cli", 2000, 909, 1.0, 4.0);
    std::ofstream out(work / "cli.csv");
    out.precision(17);
    out << "E,uE\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
      out << ds.errors[i] << ',' << ds.uncertainties[i] << '\n';
  }
  bool same = true, ran = true;
  for (const char *run : {"a", "b"}) {
    const fs::path dir = work / run;
    const std::string q = "\"" + cli + "\"";
    const std::string csv = "\"" + (work / "cli.csv").string() + "\"";
    const std::string d = "\"" + dir.string() + "\"";
    const std::vector<std::string> cmds = {
        q + " validate " + csv + " --seed 3 --boot 500 --fit --out " + d + " --svg " + d +
            " > " + d + "/summary.txt",
        q + " simulate --m 1000 --seed 3 --grid 2.2:40:6 --out " + d + "/sweep.json --svg " + d,
        q + " plot --kind k95_curve --out " + d + "/k95.svg",
    };
    fs::create_directories(dir);
    for (const auto &c : cmds)
      ran = ran && std::system(c.c_str()) == 0;
  }
  std::size_t files = 0;
  for (const auto &e : fs::directory_iterator(work / "a")) {
    ++files;
    same = same && slurp(e.path()) == slurp(work / "b" / e.path().filename());
  }
  o.check(ran, "CLI runs succeeded");
  o.check(same && files >= 6, "CLI outputs identical (" + std::to_string(files) + " files)");
  fs::remove_all(work);
  return o;
}

} // namespace

int main(int argc, char **argv) {
  std::string cli;
  std::string reference;
  if (const char *env = std::getenv("UQCAL_REFERENCE_DIR"))
    reference = env;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli")
      cli = argv[i + 1];
    else if (flag == "--reference")
      reference = argv[i + 1];
    else {
      std::cerr << "unknown argument " << flag << '\n';
      return 2;
    }
  }

  struct Criterion {
    const char *title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"k95 curve", k95_curve},
      {"coverage curve", coverage_curve},
      {"simulation sweep", simulation},
      {"fit recovery", fit_recovery},
      {"Wilson interval calibration", wilson_calibration},
      {"synthetic verdicts", synthetic_verdicts},
      {"reference contingency table", [&] { return reference_table(reference); }},
      {"LCP structure", lcp_structure},
      {"determinism", [&] { return determinism(cli); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception &e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const char *tag = o.state == Outcome::State::Pass   ? "PASS"
                      : o.state == Outcome::State::Skip ? "SKIP"
                                                        : "FAIL";
    failed += o.state == Outcome::State::Fail;
    std::cout << '[' << tag << "] " << i + 1 << ". " << criteria[i].title;
    for (std::size_t j = 0; j < o.notes.size(); ++j)
      std::cout << (j ? "; " : ": ") << o.notes[j];
    std::cout << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << '\n';
  return failed ? 1 : 0;
}
