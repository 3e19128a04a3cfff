#include "semihyp/io.hpp"
#include "semihyp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace semihyp;

namespace {

std::string slurp(const std::string& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("doubles round-trip with 17 digits") {
  for (double v : {0.1, 1.0 / 3.0, std::exp(1.0), -2.5e-300, 1e300}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("matrix JSON") {
  Mat A(2, 2);
  A << std::exp(1.0), 0.0, 0.0, std::exp(-1.0);
  const Mat B = matrix_from_json(json::parse(matrix_to_json_text(A)));
  CHECK(B == A);
  try {
    matrix_from_json(json::parse(R"({"dim": 2, "rows": [[1, 0], [0]]})"), "m");
    FAIL("ragged rows accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("m.rows[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 3, "rows": [[1]]})")), Error);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 1, "rows": [["a"]]})")), Error);
}

TEST_CASE("CSV writer") {
  const auto f = (std::filesystem::temp_directory_path() / "semihyp_io.csv").string();
  {
    CsvWriter w(f, {"a", "b"});
    w.row(std::vector<double>{0.1, 2.0});
    w.row(std::vector<std::string>{"x", "y"});
    CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), Error);
  }
  CHECK(slurp(f) == "a,b\n0.10000000000000001,2\nx,y\n");
}

TEST_CASE("strict config reader") {
  const json j = json::parse(R"({"a": 1.5, "n": 3, "flag": true, "list": [1, 2], "sub": {"x": 1}, "typo": 0})");
  ConfigReader r(j, "cmd");
  CHECK(r.number("a", 0.0) == 1.5);
  CHECK(r.integer("n", 0) == 3);
  CHECK(r.boolean("flag", false));
  CHECK(r.numbers("list", {}) == std::vector<double>{1.0, 2.0});
  CHECK(r.number("missing", 7.0) == 7.0);
  ConfigReader sub(r.child("sub"), r.field("sub"));
  CHECK(sub.number("x", 0) == 1.0);
  sub.finish();
  try {
    r.finish();
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()) == "cmd.typo: unknown key");
  }
  ConfigReader bad(j, "cmd");
  try {
    bad.integer("a", 0);
    FAIL("non-integer accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cmd.a") != std::string::npos);
  }
}

TEST_CASE("fnv1a64") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
