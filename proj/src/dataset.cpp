#include "uqcal/dataset.hpp"
#include "uqcal/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <string_view>

namespace uqcal {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_space(s.back()))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
  if (!cell.empty() && cell.front() == '+')
    cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw DatasetError("column '" + std::string(column) + "': cannot parse '" +
                           std::string(cell) + "' as a finite number",
                       line);
  return v;
}

bool is_skippable(std::string_view raw) {
  const std::string_view t = trim(raw);
  return t.empty() || t.front() == '#';
}

} // namespace

DatasetError::DatasetError(const std::string &message, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : message),
      line_(line) {}

ZSample Dataset::z() const { return z_scores(errors, uncertainties); }

Dataset parse_dataset(std::istream &in, const LoadOptions &options,
                      const std::string &source) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF"))
      raw.erase(0, 3);
    if (is_skippable(raw))
      continue;
    header_line = raw;
    header = split(header_line, options.delimiter);
    break;
  }
  if (header.empty())
    throw DatasetError("no header row found in " + source);

  std::map<std::string, std::size_t, std::less<>> columns;
  for (std::size_t i = 0; i < header.size(); ++i)
    columns.emplace(std::string(header[i]), i);
  const auto find = [&](const std::string &name) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    if (it == columns.end())
      return std::nullopt;
    return it->second;
  };

  const auto ce = find(options.e_column);
  const auto cu = find(options.ue_column);
  const auto cr = find(options.y_ref_column);
  const auto cp = find(options.y_pred_column);
  const auto cz = find(options.z_column);

  enum class Schema { ErrorUnc, RefPredUnc, ZOnly } schema;
  if (ce && cu)
    schema = Schema::ErrorUnc;
  else if (cr && cp && cu)
    schema = Schema::RefPredUnc;
  else if (cz)
    schema = Schema::ZOnly;
  else
    throw DatasetError("header must name columns {" + options.e_column + "," +
                       options.ue_column + "}, {" + options.y_ref_column + "," +
                       options.y_pred_column + "," + options.ue_column + "} or {" +
                       options.z_column + "}");

  Dataset ds;
  ds.id = options.id.value_or("dataset");
  ds.source_path = source;
  const bool with_refs = cr && cp && schema != Schema::ZOnly;
  if (with_refs) {
    ds.y_ref.emplace();
    ds.y_pred.emplace();
  }

  while (std::getline(in, raw)) {
    ++line_no;
    if (is_skippable(raw))
      continue;
    const auto cells = split(raw, options.delimiter);
    if (cells.size() != header.size())
      throw DatasetError("expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(cells.size()),
                         line_no);
    const auto cell = [&](std::size_t col) {
      return parse_number(cells[col], line_no, header[col]);
    };

    double e = 0.0;
    double u = 1.0;
    if (schema == Schema::ZOnly) {
      e = cell(*cz);
    } else {
      u = cell(*cu);
      if (!(u > 0.0))
        throw DatasetError("uncertainty must be positive, got " + std::string(cells[*cu]),
                           line_no);
    }
    if (with_refs) {
      const double r = cell(*cr);
      const double p = cell(*cp);
      ds.y_ref->push_back(r);
      ds.y_pred->push_back(p);
      const double diff = r - p;
      if (schema == Schema::RefPredUnc) {
        e = diff;
      } else {
        e = cell(*ce);
        const double tol = 1e-9 * std::max({std::fabs(r), std::fabs(p), std::fabs(e), 1e-300});
        if (std::fabs(e - diff) > tol)
          throw DatasetError("error column disagrees with y_ref - y_pred", line_no);
      }
    } else if (schema == Schema::ErrorUnc) {
      e = cell(*ce);
    }
    ds.errors.push_back(e);
    ds.uncertainties.push_back(u);
  }
  if (ds.errors.empty())
    throw DatasetError("no data rows in " + source);
  return ds;
}

Dataset load_dataset(const std::filesystem::path &path, const LoadOptions &options) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DatasetError("cannot open " + path.string());
  Dataset ds = parse_dataset(in, options, path.string());
  ds.id = options.id.value_or(path.stem().string());
  return ds;
}

} // namespace uqcal
