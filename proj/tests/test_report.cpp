#include "oracles.hpp"
#include "synthetic.hpp"

#include <uqcal/report.hpp>
#include <uqcal/version.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace uqcal;

namespace {

AnalysisConfig fast_config(std::uint64_t seed = 7) {
  AnalysisConfig c;
  c.seed = seed;
  c.n_boot = 1000;
  return c;
}

Report stub(std::string id, Verdict picp, Verdict zms) {
  Report r;
  r.dataset_id = std::move(id);
  r.picp_2sigma.verdict = picp;
  r.zms.verdict = zms;
  return r;
}

std::size_t count_lines(const std::string &s) { return std::count(s.begin(), s.end(), '\n'); }

} // namespace

TEST_CASE("analyze calibrated sets: verdict rate over seeds") {
  // Each test has a nominal 5 % false-rejection rate; P(<= 16 of 20) < 2 %.
  int zms_valid = 0, picp_valid = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto r = analyze(synth::make("good", 10'000, s), fast_config());
    zms_valid += r.zms.verdict == Verdict::Valid;
    picp_valid += r.picp_2sigma.verdict == Verdict::Valid;
  }
  MESSAGE("ZMS valid ", zms_valid, "/20, PICP valid ", picp_valid, "/20");
  CHECK(zms_valid >= 17);
  CHECK(picp_valid >= 17);
}

TEST_CASE("analyze synthetic verdicts") {
  const auto good = analyze(synth::make("good", 10'000, 1), fast_config());
  CHECK(good.picp_1sigma.diagnostic);
  CHECK(good.lcp.has_value());
  CHECK(good.lcp->bins.size() == kDefaultLcpBins);
  CHECK_FALSE(good.fit.has_value());
  CHECK(good.schema_version == kReportSchemaVersion);
  CHECK(good.tool_version == kToolVersion);
  CHECK(good.m == 10'000);

  const auto heavy = analyze(synth::make("heavy", 10'000, 2, 1.0, 2.3), fast_config());
  CHECK(heavy.picp_2sigma.verdict == Verdict::Untestable);
  CHECK(heavy.zms.verdict == Verdict::Untestable);

  const auto wide = analyze(synth::make("wide", 10'000, 3, 2.0), fast_config());
  CHECK(wide.picp_2sigma.verdict == Verdict::Invalid);
  CHECK(wide.zms.verdict == Verdict::Invalid);
  CHECK(std::fabs(wide.picp_2sigma.picp - (2 * oracle::phi(0.98) - 1)) < 0.01);
  CHECK(std::fabs(wide.zms.zms - 4.0) < 0.2);
}

TEST_CASE("analyze matches direct recomputation") {
  const auto ds = synth::make("recompute", 3000, 11, 1.2);
  const auto cfg = fast_config(99);
  const auto r = analyze(ds, cfg);
  const ZSample z = ds.z();
  CHECK(r.zms == validate_zms(z, {cfg.n_boot, cfg.level, dataset_seed(cfg.seed, ds.id)}));
  CHECK(r.picp_2sigma == validate_picp95(z));
  CHECK(r.picp_1sigma == picp_diagnostic(z, kOneSigmaTarget, 1.0));
  CHECK(*r.lcp == lcp_analysis(ds.errors, ds.uncertainties, 20));
  CHECK(r.rce == rce(ds.errors, ds.uncertainties));
  CHECK(r == analyze(ds, cfg));
}

TEST_CASE("analyze options and errors") {
  auto cfg = fast_config();
  cfg.run_fit = true;
  cfg.lcp_bins = 50;
  const auto small = analyze(synth::make("small", 40, 5), cfg);
  CHECK_FALSE(small.lcp.has_value());
  REQUIRE(small.fit.has_value());
  CHECK_FALSE(small.fit->reliable);

  Dataset bad = synth::make("broken", 10, 6);
  bad.uncertainties[3] = 0.0;
  try {
    analyze(bad, cfg);
    FAIL("expected an error");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()).starts_with("dataset 'broken': "));
  }
}

TEST_CASE("dataset seeds differ by id and are stable") {
  CHECK(dataset_seed(1, "a") == dataset_seed(1, "a"));
  CHECK(dataset_seed(1, "a") != dataset_seed(1, "b"));
  CHECK(dataset_seed(1, "a") != dataset_seed(2, "a"));
}

TEST_CASE("report JSON round trip and determinism") {
  auto cfg = fast_config();
  cfg.run_fit = true;
  const auto r = analyze(synth::make("round", 2000, 21, 1.0, 4.0), cfg);
  const std::string text = serialize(r);
  CHECK(deserialize_report(text) == r);
  CHECK(serialize(deserialize_report(text)) == text);
  CHECK(serialize(analyze(synth::make("round", 2000, 21, 1.0, 4.0), cfg)) == text);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);

  auto plain = analyze(synth::make("flat", 500, 22), fast_config());
  plain.lcp.reset();
  CHECK(deserialize_report(serialize(plain)) == plain);

  std::string old = text;
  old.replace(old.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
  CHECK_THROWS(deserialize_report(old));
}

TEST_CASE("sweep JSON round trip") {
  const auto pts = sweep(std::vector<double>{2.2, 3.0, 10.0}, 500, 4);
  const std::string text = serialize(pts, 500, 4);
  CHECK(deserialize_sweep(text) == pts);
  CHECK_THROWS(deserialize_sweep(serialize(analyze(synth::make("x", 200, 1), fast_config()))));
}

TEST_CASE("summary CSV") {
  const std::vector<Report> reps{analyze(synth::make("a", 500, 1), fast_config()),
                                 analyze(synth::make("b", 500, 2, 2.0), fast_config())};
  const std::string csv = summary_csv(reps);
  CHECK(count_lines(csv) == 3);
  CHECK(csv.starts_with("id,m,"));
  CHECK(csv.find("\nb,500,") != std::string::npos);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  const auto fields = std::count(header.begin(), header.end(), ',');
  for (std::string line; std::getline(in, line);)
    CHECK(std::count(line.begin(), line.end(), ',') == fields);
}

TEST_CASE("contingency examples") {
  const std::vector<Report> one{stub("x", Verdict::Valid, Verdict::Valid)};
  const auto t = contingency(one);
  CHECK(t.counts[0][0] == 1);
  CHECK(t.row_sums == std::array<std::size_t, 3>{1, 0, 0});
  CHECK(t.col_sums == std::array<std::size_t, 3>{1, 0, 0});
  CHECK(t.total == 1);
  CHECK_THROWS_AS(contingency(std::vector<Report>{}), std::invalid_argument);
}

TEST_CASE("contingency sums and order invariance") {
  const Verdict vs[] = {Verdict::Valid, Verdict::Invalid, Verdict::Untestable};
  std::vector<Report> reps;
  Rng rng(3);
  for (int i = 0; i < 33; ++i)
    reps.push_back(stub("set" + std::to_string(i), vs[rng.index(3)], vs[rng.index(3)]));
  const auto t = contingency(reps);
  CHECK(t.total == 33);
  std::size_t sum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      row += t.counts[i][j];
      col += t.counts[j][i];
    }
    CHECK(row == t.row_sums[i]);
    CHECK(col == t.col_sums[i]);
    CHECK(t.picp_ids[i].size() == t.row_sums[i]);
    CHECK(t.zms_ids[i].size() == t.col_sums[i]);
    sum += row;
  }
  CHECK(sum == 33);

  std::reverse(reps.begin(), reps.end());
  std::rotate(reps.begin(), reps.begin() + 10, reps.end());
  CHECK(contingency(reps) == t);
  CHECK(serialize(contingency(reps)) == serialize(t));

  const std::string text = contingency_text(t);
  CHECK(count_lines(text) == 5);
  CHECK(text.find("untestable") != std::string::npos);
}
