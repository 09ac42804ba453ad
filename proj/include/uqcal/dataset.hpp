#pragma once

#include "uqcal/zsample.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqcal {

/// Errors E (= y_ref - y_pred) and positive uncertainties uE of one
/// validation set.
struct Dataset {
  std::string id;
  std::vector<double> errors;
  std::vector<double> uncertainties;
  std::optional<std::vector<double>> y_ref;
  std::optional<std::vector<double>> y_pred;
  std::string source_path;

  std::size_t size() const { return errors.size(); }
  ZSample z() const;
};

/// Load failure; `line()` is the 1-based input line, 0 when not line-specific.
class DatasetError : public std::runtime_error {
public:
  DatasetError(const std::string &message, std::size_t line = 0);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Column names the loader looks for. Any of {z}, {e, ue} or
/// {y_ref, y_pred, ue} must be present in the header; extra columns are
/// ignored. When several sets are present, {e, ue} wins over
/// {y_ref, y_pred, ue}, which wins over {z}.
struct LoadOptions {
  std::string z_column = "Z";
  std::string e_column = "E";
  std::string ue_column = "uE";
  std::string y_ref_column = "y_ref";
  std::string y_pred_column = "y_pred";
  char delimiter = ',';
  /// Dataset id; defaults to the file stem.
  std::optional<std::string> id;
};

/// Parses UTF-8 CSV with a header row. Blank lines and lines starting with
/// '#' are skipped. A Z-only file yields uE = 1 and E = Z.
Dataset parse_dataset(std::istream &in, const LoadOptions &options = {},
                      const std::string &source = "<stream>");

Dataset load_dataset(const std::filesystem::path &path,
                     const LoadOptions &options = {});

} // namespace uqcal
