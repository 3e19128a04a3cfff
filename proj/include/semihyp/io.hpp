#pragma once

// JSON matrices, CSV tables, strict config reading and run manifests.

#include "semihyp/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace semihyp {

using json = nlohmann::json;

/// Decimal with 17 significant digits (round-trips IEEE doubles).
std::string format_double(double v);

/// {"dim": n, "rows": [[...], ...]}, entries written with 17 significant digits.
std::string matrix_to_json_text(const Mat& A);
json matrix_to_json(const Mat& A);
Mat matrix_from_json(const json& j, const std::string& path = "matrix");
Mat read_matrix_file(const std::string& file);
void write_text(const std::string& file, const std::string& text);

/// Comma-separated with a header row and LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& file, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::uint64_t fnv1a64(const std::string& data);

/// Reads typed fields from a JSON object and rejects keys nobody asked for.
class ConfigReader {
 public:
  ConfigReader(const json& node, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  /// Raw access for nested objects and arrays; marks the key as used.
  const json& child(const std::string& key);
  std::string field(const std::string& key) const { return path_ + "." + key; }

  /// Throws a Config error naming the first unknown key.
  void finish() const;

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace semihyp
