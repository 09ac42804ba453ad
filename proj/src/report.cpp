#include "uqcal/report.hpp"
#include "uqcal/rng.hpp"
#include "uqcal/version.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uqcal {

using Json = nlohmann::ordered_json;

namespace {

Json opt(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_double(const Json &j) {
  if (j.is_null())
    return std::nullopt;
  return j.get<double>();
}

Verdict verdict_of(const Json &j) {
  const auto v = verdict_from_string(j.get<std::string>());
  if (!v)
    throw std::runtime_error("unknown verdict '" + j.get<std::string>() + "'");
  return *v;
}

Json to_json(const ZmsResult &r) {
  Json j;
  j["zms"] = r.zms;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["level"] = r.level;
  j["n_boot"] = r.n_boot;
  j["beta_gm_z2"] = opt(r.beta_gm_z2);
  j["degenerate"] = r.degenerate;
  j["verdict"] = to_string(r.verdict);
  return j;
}

ZmsResult zms_from_json(const Json &j) {
  ZmsResult r;
  r.zms = j.at("zms").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.level = j.at("level").get<double>();
  r.n_boot = j.at("n_boot").get<std::size_t>();
  r.beta_gm_z2 = opt_double(j.at("beta_gm_z2"));
  r.degenerate = j.at("degenerate").get<bool>();
  r.verdict = verdict_of(j.at("verdict"));
  return r;
}

Json to_json(const CoverageResult &r) {
  Json j;
  j["p_target"] = r.p_target;
  j["k"] = r.k;
  j["hits"] = r.hits;
  j["m"] = r.m;
  j["picp"] = r.picp;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["level"] = r.level;
  j["beta_gm_z2"] = opt(r.beta_gm_z2);
  j["diagnostic"] = r.diagnostic;
  j["verdict"] = to_string(r.verdict);
  return j;
}

CoverageResult coverage_from_json(const Json &j) {
  CoverageResult r;
  r.p_target = j.at("p_target").get<double>();
  r.k = j.at("k").get<double>();
  r.hits = j.at("hits").get<std::size_t>();
  r.m = j.at("m").get<std::size_t>();
  r.picp = j.at("picp").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.level = j.at("level").get<double>();
  r.beta_gm_z2 = opt_double(j.at("beta_gm_z2"));
  r.diagnostic = j.at("diagnostic").get<bool>();
  r.verdict = verdict_of(j.at("verdict"));
  return r;
}

Json to_json(const LcpResult &r) {
  Json j;
  j["n_bins"] = r.n_bins;
  j["overall"] = to_json(r.overall);
  Json bins = Json::array();
  for (const auto &b : r.bins) {
    Json jb;
    jb["index"] = b.index;
    jb["ue_low"] = b.ue_low;
    jb["ue_high"] = b.ue_high;
    jb["coverage"] = to_json(b.coverage);
    bins.push_back(std::move(jb));
  }
  j["bins"] = std::move(bins);
  return j;
}

LcpResult lcp_from_json(const Json &j) {
  LcpResult r;
  r.n_bins = j.at("n_bins").get<std::size_t>();
  r.overall = coverage_from_json(j.at("overall"));
  for (const auto &jb : j.at("bins")) {
    LcpBin b;
    b.index = jb.at("index").get<std::size_t>();
    b.ue_low = jb.at("ue_low").get<double>();
    b.ue_high = jb.at("ue_high").get<double>();
    b.coverage = coverage_from_json(jb.at("coverage"));
    r.bins.push_back(std::move(b));
  }
  return r;
}

Json to_json(const FitResult &r) {
  Json j;
  j["nu"] = r.nu;
  j["scale"] = r.scale;
  j["ks"] = r.ks;
  j["converged"] = r.converged;
  j["n_restarts_used"] = r.n_restarts_used;
  j["best_start"] = r.best_start;
  j["unit_mean"] = r.unit_mean;
  j["reliable"] = r.reliable;
  return j;
}

FitResult fit_from_json(const Json &j) {
  FitResult r;
  r.nu = j.at("nu").get<double>();
  r.scale = j.at("scale").get<double>();
  r.ks = j.at("ks").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.n_restarts_used = j.at("n_restarts_used").get<std::size_t>();
  r.best_start = j.at("best_start").get<std::size_t>();
  r.unit_mean = j.at("unit_mean").get<bool>();
  r.reliable = j.at("reliable").get<bool>();
  return r;
}

std::size_t slot(Verdict v) {
  switch (v) {
  case Verdict::Valid:
    return 0;
  case Verdict::Invalid:
    return 1;
  case Verdict::Untestable:
    return 2;
  }
  return 2;
}

std::string fmt(double v, const char *spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_opt(const std::optional<double> &v) { return v ? fmt(*v) : std::string(); }

} // namespace

std::uint64_t dataset_seed(std::uint64_t master, std::string_view dataset_id) {
  return derive_seed(master, stable_hash(dataset_id));
}

Report analyze(const Dataset &ds, const AnalysisConfig &config) {
  try {
    Report r;
    r.schema_version = kReportSchemaVersion;
    r.tool_version = kToolVersion;
    r.dataset_id = ds.id;
    r.m = ds.size();
    r.seed = config.seed;

    const ZSample z = ds.z();
    r.zms = validate_zms(z, {config.n_boot, config.level, dataset_seed(config.seed, ds.id)});
    r.rce = rce(ds.errors, ds.uncertainties);
    r.beta_gm_z2 = try_beta_gm(z.squared());
    std::vector<double> ue2(ds.uncertainties.size());
    std::transform(ds.uncertainties.begin(), ds.uncertainties.end(), ue2.begin(),
                   [](double u) { return u * u; });
    r.beta_gm_ue2 = try_beta_gm(ue2);

    r.picp_2sigma = validate_picp95(z, config.level);
    r.picp_1sigma = picp_diagnostic(z, kOneSigmaTarget, 1.0, config.level);

    if (config.run_lcp && ds.size() >= config.lcp_bins)
      r.lcp = lcp_analysis(ds.errors, ds.uncertainties, config.lcp_bins, config.level);
    if (config.run_fit) {
      FitOptions fo;
      fo.unit_mean = config.fit_unit_mean;
      r.fit = fit_scaled_f(z.squared(), fo);
    }
    return r;
  } catch (const std::exception &e) {
    throw std::runtime_error("dataset '" + ds.id + "': " + e.what());
  }
}

std::string serialize(const Report &r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  j["dataset"] = Json{{"id", r.dataset_id}, {"m", r.m}};
  j["seed"] = r.seed;
  j["zms"] = to_json(r.zms);
  j["rce"] = r.rce;
  j["beta_gm_z2"] = opt(r.beta_gm_z2);
  j["beta_gm_ue2"] = opt(r.beta_gm_ue2);
  j["picp_2sigma"] = to_json(r.picp_2sigma);
  j["picp_1sigma"] = to_json(r.picp_1sigma);
  j["lcp"] = r.lcp ? to_json(*r.lcp) : Json(nullptr);
  j["fit"] = r.fit ? to_json(*r.fit) : Json(nullptr);
  return j.dump(2) + "\n";
}

Report deserialize_report(std::string_view text) {
  const Json j = Json::parse(text);
  Report r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kReportSchemaVersion)
    throw std::runtime_error("unsupported report schema version " +
                             std::to_string(r.schema_version));
  r.tool_version = j.at("tool_version").get<std::string>();
  r.dataset_id = j.at("dataset").at("id").get<std::string>();
  r.m = j.at("dataset").at("m").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.zms = zms_from_json(j.at("zms"));
  r.rce = j.at("rce").get<double>();
  r.beta_gm_z2 = opt_double(j.at("beta_gm_z2"));
  r.beta_gm_ue2 = opt_double(j.at("beta_gm_ue2"));
  r.picp_2sigma = coverage_from_json(j.at("picp_2sigma"));
  r.picp_1sigma = coverage_from_json(j.at("picp_1sigma"));
  if (!j.at("lcp").is_null())
    r.lcp = lcp_from_json(j.at("lcp"));
  if (!j.at("fit").is_null())
    r.fit = fit_from_json(j.at("fit"));
  return r;
}

std::string serialize(std::span<const SimPoint> points, std::size_t m,
                      std::uint64_t seed) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["kind"] = "sweep";
  j["m"] = m;
  j["seed"] = seed;
  Json arr = Json::array();
  for (const auto &p : points) {
    Json jp;
    jp["nu"] = p.nu;
    jp["beta_gm_z2"] = opt(p.beta_gm_z2);
    jp["theoretical"] = p.theoretical;
    jp["coverage"] = to_json(p.coverage);
    arr.push_back(std::move(jp));
  }
  j["points"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<SimPoint> deserialize_sweep(std::string_view text) {
  const Json j = Json::parse(text);
  if (j.value("kind", std::string()) != "sweep")
    throw std::runtime_error("document is not a sweep result");
  std::vector<SimPoint> out;
  for (const auto &jp : j.at("points")) {
    SimPoint p;
    p.nu = jp.at("nu").get<double>();
    p.beta_gm_z2 = opt_double(jp.at("beta_gm_z2"));
    p.theoretical = jp.at("theoretical").get<double>();
    p.coverage = coverage_from_json(jp.at("coverage"));
    out.push_back(std::move(p));
  }
  return out;
}

std::string summary_csv(std::span<const Report> reports) {
  std::ostringstream out;
  out << "id,m,beta_gm_z2,beta_gm_ue2,zms,zms_ci_low,zms_ci_high,zms_verdict,rce,"
         "picp95,picp95_ci_low,picp95_ci_high,picp95_verdict,picp68,picp68_verdict\n";
  for (const auto &r : reports) {
    out << r.dataset_id << ',' << r.m << ',' << fmt_opt(r.beta_gm_z2) << ','
        << fmt_opt(r.beta_gm_ue2) << ',' << fmt(r.zms.zms) << ',' << fmt(r.zms.ci_low) << ','
        << fmt(r.zms.ci_high) << ',' << to_string(r.zms.verdict) << ',' << fmt(r.rce) << ','
        << fmt(r.picp_2sigma.picp) << ',' << fmt(r.picp_2sigma.ci_low) << ','
        << fmt(r.picp_2sigma.ci_high) << ',' << to_string(r.picp_2sigma.verdict) << ','
        << fmt(r.picp_1sigma.picp) << ',' << to_string(r.picp_1sigma.verdict) << '\n';
  }
  return out.str();
}

ContingencyTable contingency(std::span<const Report> reports) {
  if (reports.empty())
    throw std::invalid_argument("contingency: no reports");
  ContingencyTable t;
  for (const auto &r : reports) {
    const std::size_t row = slot(r.picp_2sigma.verdict);
    const std::size_t col = slot(r.zms.verdict);
    ++t.counts[row][col];
    ++t.row_sums[row];
    ++t.col_sums[col];
    ++t.total;
    t.picp_ids[row].push_back(r.dataset_id);
    t.zms_ids[col].push_back(r.dataset_id);
  }
  for (auto &ids : t.picp_ids)
    std::sort(ids.begin(), ids.end());
  for (auto &ids : t.zms_ids)
    std::sort(ids.begin(), ids.end());
  return t;
}

std::string serialize(const ContingencyTable &t) {
  static constexpr const char *names[] = {"valid", "invalid", "untestable"};
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["rows"] = "picp";
  j["columns"] = "zms";
  Json counts = Json::array();
  for (const auto &row : t.counts)
    counts.push_back(Json(row));
  j["counts"] = std::move(counts);
  j["row_sums"] = t.row_sums;
  j["col_sums"] = t.col_sums;
  j["total"] = t.total;
  Json picp;
  Json zms;
  for (std::size_t i = 0; i < 3; ++i) {
    picp[names[i]] = t.picp_ids[i];
    zms[names[i]] = t.zms_ids[i];
  }
  j["picp_ids"] = std::move(picp);
  j["zms_ids"] = std::move(zms);
  return j.dump(2) + "\n";
}

std::string contingency_text(const ContingencyTable &t) {
  static constexpr const char *names[] = {"valid", "invalid", "untestable"};
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s%12s%12s%12s%8s\n", "PICP \\ ZMS", "valid", "invalid",
                "untestable", "sum");
  out << buf;
  for (std::size_t i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "%-16s%12zu%12zu%12zu%8zu\n", names[i], t.counts[i][0],
                  t.counts[i][1], t.counts[i][2], t.row_sums[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-16s%12zu%12zu%12zu%8zu\n", "sum", t.col_sums[0],
                t.col_sums[1], t.col_sums[2], t.total);
  out << buf;
  return out.str();
}

} // namespace uqcal
