#include "semihyp/io.hpp"

#include "semihyp/error.hpp"

#include <cstdio>
#include <sstream>

namespace semihyp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_json_text(const Mat& A) {
  std::string out = "{\"dim\": " + std::to_string(A.rows()) + ", \"rows\": [";
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    out += i ? ", [" : "[";
    for (Eigen::Index j = 0; j < A.cols(); ++j) out += (j ? ", " : "") + format_double(A(i, j));
    out += "]";
  }
  return out + "]}";
}

json matrix_to_json(const Mat& A) { return json::parse(matrix_to_json_text(A)); }

Mat matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(ErrorKind::Config, path + ": expected an object with dim and rows");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "dim" && it.key() != "rows") fail(ErrorKind::Config, path + "." + it.key() + ": unknown key");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) fail(ErrorKind::Config, path + ".dim: expected an integer");
  if (!j.contains("rows") || !j["rows"].is_array()) fail(ErrorKind::Config, path + ".rows: expected an array");
  const long n = j["dim"].get<long>();
  if (n <= 0 || n % 2 != 0) fail(ErrorKind::Config, path + ".dim: must be even and positive");
  const json& rows = j["rows"];
  if (static_cast<long>(rows.size()) != n) fail(ErrorKind::Config, path + ".rows: expected " + std::to_string(n) + " rows");
  Mat A(n, n);
  for (long i = 0; i < n; ++i) {
    const std::string rp = path + ".rows[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || static_cast<long>(rows[i].size()) != n)
      fail(ErrorKind::Config, rp + ": expected " + std::to_string(n) + " numbers");
    for (long k = 0; k < n; ++k) {
      if (!rows[i][k].is_number()) fail(ErrorKind::Config, rp + "[" + std::to_string(k) + "]: expected a number");
      A(i, k) = rows[i][k].get<double>();
    }
  }
  return A;
}

Mat read_matrix_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::Config, "matrix: cannot open " + file);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "matrix: " + std::string(e.what()));
  }
  return matrix_from_json(j);
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + file);
  out << text;
}

CsvWriter::CsvWriter(const std::string& file, const std::vector<std::string>& header)
    : out_(file, std::ios::binary), columns_(header.size()) {
  if (!out_) fail(ErrorKind::InvalidInput, "cannot write " + file);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) fail(ErrorKind::InvalidInput, "csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ConfigReader::ConfigReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) fail(ErrorKind::Config, path_ + ": expected an object");
}

bool ConfigReader::has(const std::string& key) const { return node_.contains(key); }

double ConfigReader::number(const std::string& key, double fallback) {
  used_.insert(key);
  if (!node_.contains(key)) return fallback;
  if (!node_[key].is_number()) fail(ErrorKind::Config, field(key) + ": expected a number");
  return node_[key].get<double>();
}

int ConfigReader::integer(const std::string& key, int fallback) {
  used_.insert(key);
  if (!node_.contains(key)) return fallback;
  if (!node_[key].is_number_integer()) fail(ErrorKind::Config, field(key) + ": expected an integer");
  return node_[key].get<int>();
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
  used_.insert(key);
  if (!node_.contains(key)) return fallback;
  if (!node_[key].is_boolean()) fail(ErrorKind::Config, field(key) + ": expected true or false");
  return node_[key].get<bool>();
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  if (!node_.contains(key)) return fallback;
  if (!node_[key].is_string()) fail(ErrorKind::Config, field(key) + ": expected a string");
  return node_[key].get<std::string>();
}

std::vector<double> ConfigReader::numbers(const std::string& key, const std::vector<double>& fallback) {
  used_.insert(key);
  if (!node_.contains(key)) return fallback;
  const json& a = node_[key];
  if (!a.is_array()) fail(ErrorKind::Config, field(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) fail(ErrorKind::Config, field(key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

const json& ConfigReader::child(const std::string& key) {
  used_.insert(key);
  if (!node_.contains(key)) fail(ErrorKind::Config, field(key) + ": missing");
  return node_[key];
}

void ConfigReader::finish() const {
  for (auto it = node_.begin(); it != node_.end(); ++it)
    if (!used_.count(it.key())) fail(ErrorKind::Config, field(it.key()) + ": unknown key");
}

}  // namespace semihyp
