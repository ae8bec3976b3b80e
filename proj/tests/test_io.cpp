#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "certlab/certificate.hpp"
#include "certlab/io.hpp"
#include "certlab/scan.hpp"

using namespace certlab;

namespace {

std::string tmp_path(const char* name) {
  return std::string("io_test_") + name;
}

Heatmap small_scalar_map() {
  Heatmap h;
  h.payload = Heatmap::Payload::Scalar;
  h.xs = {0.1, 0.2};
  h.ys = {1.0, 2.0, 3.0};
  h.cells.resize(6);
  double v = -2.5;
  for (auto& c : h.cells) {
    c.value = v;
    v += 1.0;
  }
  return h;
}

}  // namespace

TEST_CASE("doubles round-trip through their text form") {
  const std::vector<double> samples = {
      0.0, -0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, M_PI, 1e-308, 1.7976931348623157e308,
      6.02214076e23, -2.2250738585072014e-308, 16.0 / 17.0};
  for (double x : samples) {
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv field quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("heatmap csv round-trips exactly") {
  Heatmap h = small_scalar_map();
  h.cells[2].value = std::numeric_limits<double>::quiet_NaN();
  const std::string path = tmp_path("heatmap.csv");
  write_heatmap_csv(h, path);
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 7u);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "value"});
  // Row order: y outer, x inner.
  CHECK(std::strtod(rows[1][0].c_str(), nullptr) == 0.1);
  CHECK(std::strtod(rows[1][1].c_str(), nullptr) == 1.0);
  CHECK(std::strtod(rows[1][2].c_str(), nullptr) == -2.5);
  CHECK(rows[3][2] == "nan");
  CHECK(std::strtod(rows[6][2].c_str(), nullptr) == 2.5);
  std::remove(path.c_str());
}

TEST_CASE("pass/fail heatmap csv carries the flag column") {
  Heatmap h;
  h.payload = Heatmap::Payload::PassFail;
  h.xs = {0.5};
  h.ys = {1.5};
  h.cells.resize(1);
  h.cells[0].flag = true;
  h.cells[0].value = -0.25;
  const std::string path = tmp_path("passfail.csv");
  write_heatmap_csv(h, path);
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 2u);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "pass", "worst_value"});
  CHECK(rows[1][2] == "1");
  CHECK(std::strtod(rows[1][3].c_str(), nullptr) == -0.25);
  std::remove(path.c_str());
}

TEST_CASE("trajectory csv round-trips exactly") {
  TrajectoryOptions opt;
  opt.cert = CertKind::Isc;
  opt.delta_lo = 0.5;
  opt.record_remainder = true;
  const ProblemSpec spec = ProblemSpec::scalar(1.0, 0.9);
  const auto recs =
      run_trajectory(spec, Point{{1.6, 1.9}}, 6, opt);
  const std::string path = tmp_path("traj.csv");
  write_trajectory_csv(recs, path);
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == recs.size() + 1);
  REQUIRE(rows[0].size() == 15u);
  CHECK(rows[0][0] == "t");
  CHECK(rows[0][1] == "c0");
  CHECK(rows[0][3] == "L");
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& row = rows[i + 1];
    CHECK(std::atoi(row[0].c_str()) == recs[i].t);
    CHECK(std::strtod(row[1].c_str(), nullptr) == recs[i].x.coords[0]);
    CHECK(std::strtod(row[2].c_str(), nullptr) == recs[i].x.coords[1]);
    CHECK(std::strtod(row[3].c_str(), nullptr) == recs[i].obs.L);
    CHECK(std::strtod(row[11].c_str(), nullptr) == recs[i].delta);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_trajectory_csv({}, tmp_path("empty.csv")),
                  std::invalid_argument);
}

TEST_CASE("csv reader handles quoting, CRLF, and embedded separators") {
  const std::string path = tmp_path("tricky.csv");
  write_text_file(path,
                  "a,b,c\r\n"
                  "1,\"x,y\",\"he said \"\"hi\"\"\"\r\n"
                  "2,\"multi\nline\",3\n"
                  "4,,6");
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 4u);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1][1] == "x,y");
  CHECK(rows[1][2] == "he said \"hi\"");
  CHECK(rows[2][1] == "multi\nline");
  CHECK(rows[3] == std::vector<std::string>{"4", "", "6"});
  std::remove(path.c_str());
}

TEST_CASE("manifest json parses back with the envelope fields") {
  const std::string text = manifest_json(
      "scan-xi", {{"eta", "0.2"}, {"sigma", "0.5"}, {"seed", "2024"}});
  const auto j = nlohmann::json::parse(text);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["subcommand"] == "scan-xi");
  CHECK(j["config"]["eta"] == "0.2");
  CHECK(j["config"]["sigma"] == "0.5");
  CHECK(j["config"]["seed"] == "2024");
}

TEST_CASE("json number encoding") {
  CHECK(json_number(0.5) == "0.5");
  CHECK(json_number(std::numeric_limits<double>::quiet_NaN()) == "\"nan\"");
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "\"inf\"");
  // Must itself be valid JSON in both cases.
  CHECK_NOTHROW(nlohmann::json::parse(json_number(1.0 / 3.0)));
  CHECK_NOTHROW(nlohmann::json::parse(json_number(0.0 / 0.0)));
}

TEST_CASE("ppm rendering is well-formed and deterministic") {
  const Heatmap h = small_scalar_map();
  const std::string p1 = tmp_path("map1.ppm");
  const std::string p2 = tmp_path("map2.ppm");
  render_heatmap_ppm(h, p1, {}, 3);
  render_heatmap_ppm(h, p2, {}, 3);
  const std::string d1 = read_text_file(p1);
  const std::string d2 = read_text_file(p2);
  CHECK(d1 == d2);
  // Header: P6, width height (cells times pixel scale), maxval 255.
  CHECK(d1.substr(0, 3) == "P6\n");
  CHECK(d1.substr(3, 4) == "6 9\n");
  CHECK(d1.substr(7, 4) == "255\n");
  CHECK(d1.size() == 11u + 6u * 9u * 3u);
  // An overlay of the wrong size is rejected.
  CHECK_THROWS_AS(render_heatmap_ppm(h, p1, {1.0, -1.0}, 3),
                  std::invalid_argument);
  // A sign-changing overlay paints at least one black contour pixel.
  render_heatmap_ppm(h, p2, {-1, -1, 1, 1, 1, 1}, 1);
  const std::string d3 = read_text_file(p2);
  bool black = false;
  for (std::size_t i = 11; i + 2 < d3.size(); i += 3)
    if (d3[i] == 0 && d3[i + 1] == 0 && d3[i + 2] == 0) black = true;
  CHECK(black);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("command line interface exit codes") {
  // ctest runs from the build directory, next to the binary.
  CHECK(std::system("./certlab verify > io_test_cli.out 2>&1") == 0);
  const int bad = std::system("./certlab --no-such-flag > io_test_cli.out 2>&1");
  CHECK(WEXITSTATUS(bad) == 2);
  const int badsub = std::system("./certlab frobnicate > io_test_cli.out 2>&1");
  CHECK(WEXITSTATUS(badsub) == 2);
  std::remove("io_test_cli.out");
}
