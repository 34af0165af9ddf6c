#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "vaxgame/cli_io.hpp"
#include "vaxgame/errors.hpp"

using namespace vaxgame;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vaxgame");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / "vaxgame_cli_tests";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("curve spec parsing") {
  const auto e1 = parse_curve_spec(R"({"family":"example1"})");
  CHECK(e1.family == CurveFamily::kExample1);
  CHECK(e1.R0 == 5.0);
  CHECK(e1.transition_lo == 0.7);
  CHECK(e1.transition_hi == 0.8);

  const auto cx = parse_curve_spec(R"({"family":"convex_test","p_star":0.8,"exponent":3})");
  CHECK(cx.family == CurveFamily::kConvexTest);
  CHECK(cx.p_star == 0.8);
  CHECK(cx.exponent == 3);

  const auto rg = parse_curve_spec(R"({"family":"rational_glue","R0":10})");
  CHECK(rg.transition_hi == doctest::Approx(0.9));
  CHECK(rg.transition_lo == doctest::Approx(0.8));

  CHECK_THROWS_WITH_AS((parse_curve_spec(R"({"family":"example1","R0":0.5})")), doctest::Contains("$.R0"),
                       ParameterError);
  CHECK_THROWS_WITH_AS((parse_curve_spec(R"({"family":"example1","colour":1})")), doctest::Contains("$.colour"),
                       ParameterError);
  CHECK_THROWS_WITH_AS((parse_curve_spec(R"({"family":"example2","R0":5})")), doctest::Contains("$.R0"),
                       ParameterError);
  CHECK_THROWS_WITH_AS((parse_curve_spec(R"({"family":"convex_test","exponent":"3"})")),
                       doctest::Contains("$.exponent"), ParameterError);
  CHECK_THROWS_WITH_AS((parse_curve_spec(R"({"R0":5})")), doctest::Contains("$.family"), ParameterError);
  CHECK_THROWS_AS(parse_curve_spec(R"({"family":"example1")"), ParameterError);
  CHECK_THROWS_AS(parse_curve_spec(R"([1,2])"), ParameterError);
  CHECK_THROWS_AS((parse_curve_spec(R"({"family":"rational_glue"})")), ParameterError);

  const auto back = parse_curve_spec(curve_spec_to_json(cx).dump());
  CHECK(back.p_star == cx.p_star);
  CHECK(back.exponent == cx.exponent);
}

TEST_CASE("real formatting round-trips") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(0.5) == "0.5");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("equilibria on example2") {
  const auto r = cli({"equilibria", "--curve", "example2", "--r", "0.909", "--eps", "0.188"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"r", "eps", "P", "f_prime", "class"});
  const double golden[3] = {0.16440220702904298, 0.45311266833835873, 0.51808022251008967};
  const char* cls[3] = {"stable", "unstable", "stable"};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(std::stod(rows[i + 1][2]) - golden[i]) <= 1e-9);
    CHECK(rows[i + 1][4] == cls[i]);
  }
}

TEST_CASE("equilibria on the convex test curve") {
  const auto r = cli({"equilibria", "--curve", "convex_test", "--p-star", "0.8", "--exponent", "3", "--r", "0.5",
                      "--eps", "0"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[1][2]) - 0.16503957921272017) <= 1e-10);
  CHECK(rows[1][4] == "stable");

  const auto j = cli({"equilibria", "--curve-json", R"({"family":"convex_test"})", "--r", "0.5", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto set = equilibria_from_json(nlohmann::json::parse(j.out));
  REQUIRE(set.size() == 1);
  CHECK(std::abs(set.equilibria[0].P - 0.16503957921272017) <= 1e-10);
}

TEST_CASE("sweep-r rows lie on the closed-form branch") {
  const auto r = cli({"sweep-r", "--curve", "example1", "--eps", "0.078", "--samples", "100"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() > 100);
  CHECK(rows[0] == std::vector<std::string>{"axis", "fixed_value", "param", "P", "class"});
  GlueKernel k;
  const auto c = make_example1(k);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double rv = std::stod(rows[i][2]), P = std::stod(rows[i][3]);
    CHECK(std::abs(rv - (c.pi(P) - 0.078 * c.dpi(P) * (1.0 - P))) <= 1e-8);
  }
}

TEST_CASE("other commands run") {
  CHECK(cli({"validate", "--curve", "example2"}).code == 0);
  const auto t = cli({"trajectory", "--curve", "convex_test", "--r", "0.5", "--p0", "0.9", "--t-end", "1", "--dt",
                      "0.25"});
  REQUIRE(t.code == 0);
  CHECK(csv_rows(t.out).size() == 6);
  CHECK(cli({"tangency", "--curve", "example2", "--p-samples", "50"}).code == 0);
  CHECK(cli({"surface", "--curve", "example2", "--p-samples", "20", "--eps-samples", "5"}).code == 0);
  const auto ev = cli({"sweep-eps", "--curve", "example2", "--r", "0.909", "--samples", "41", "--table", "events"});
  REQUIRE(ev.code == 0);
  CHECK(csv_rows(ev.out).size() >= 2);
}

TEST_CASE("exit codes") {
  SUBCASE("unknown curve family") {
    const auto r = cli({"equilibria", "--curve", "example9", "--r", "0.5"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
  }
  SUBCASE("parameter out of range") {
    CHECK(cli({"equilibria", "--curve", "example1", "--r", "1.5"}).code == 1);
    CHECK(cli({"equilibria", "--curve", "example1", "--r", "0.5", "--eps", "-1"}).code == 1);
  }
  SUBCASE("r = 0 eps sweep is a precondition failure") {
    CHECK(cli({"sweep-eps", "--curve", "example1", "--r", "0", "--samples", "5"}).code == 1);
  }
  SUBCASE("unwritable output path") {
    CHECK(cli({"equilibria", "--curve", "example1", "--out", "/nonexistent-dir/x/out.csv"}).code == 1);
  }
  SUBCASE("quadrature failure is a numerical error") {
    CHECK(cli({"equilibria", "--curve", "example1", "--quad-tol", "1e-300"}).code == 2);
  }
  SUBCASE("failed assumption") {
    const auto r = cli({"validate", "--curve", "example1", "--grid-n", "8"});
    CHECK(r.code == 1);
  }
}

TEST_CASE("file output writes a metadata sidecar") {
  const auto path = scratch_dir() / "eq.csv";
  fs::remove(path);
  fs::remove(path.string() + ".meta.json");
  const auto r = cli({"equilibria", "--curve", "example2", "--r", "0.909", "--eps", "0.188", "--out", path.string()});
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(path));
  const auto meta = nlohmann::json::parse(slurp(path.string() + ".meta.json"));
  CHECK(meta.at("tool") == "vaxgame");
  CHECK(meta.at("version") == std::string(kToolVersion));
  CHECK(meta.at("config").at("r") == 0.909);
  CHECK(meta.at("wall_time_s").get<double>() >= 0.0);
  CHECK(csv_rows(slurp(path)).size() == 4);
}

TEST_CASE("output is byte-identical across runs and thread counts") {
  const auto a = cli({"sweep-r", "--curve", "example2", "--eps", "0.188", "--samples", "60", "--format", "json"});
  const auto b = cli({"sweep-r", "--curve", "example2", "--eps", "0.188", "--samples", "60", "--format", "json"});
  const auto c = cli({"sweep-r", "--curve", "example2", "--eps", "0.188", "--samples", "60", "--format", "json",
                      "--threads", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("JSON round-trips") {
  GlueKernel k;
  const auto curve = make_example2(k);
  const auto set = find_all(curve, {0.909, 0.188});
  const auto back = equilibria_from_json(equilibria_to_json(set));
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(back.equilibria[i].P == set.equilibria[i].P);
    CHECK(back.equilibria[i].f_prime == set.equilibria[i].f_prime);
    CHECK(back.equilibria[i].classification == set.equilibria[i].classification);
  }
  CHECK(back.params.r == 0.909);
  CHECK(back.curve_label == "example2");

  const auto d = sweep_eps(curve, 0.909, linear_grid(0.0, 1.0, 21));
  const auto dj = diagram_to_json(d);
  const auto d2 = diagram_from_json(dj);
  CHECK(d2.axis == d.axis);
  CHECK(d2.fixed_value == d.fixed_value);
  CHECK(d2.grid == d.grid);
  CHECK(d2.counts == d.counts);
  REQUIRE(d2.points.size() == d.points.size());
  for (std::size_t i = 0; i < d.points.size(); ++i) CHECK(d2.points[i].P == d.points[i].P);
  REQUIRE(d2.events.size() == d.events.size());
  CHECK(diagram_to_json(d2) == dj);

  const auto tc = tangency_curve(curve, interior_grid(0.0, curve.p_star(), 30));
  const auto tc2 = tangency_from_json(tangency_to_json(tc, curve.label()));
  REQUIRE(tc2.points.size() == tc.points.size());
  for (std::size_t i = 0; i < tc.points.size(); ++i) CHECK(tc2.points[i].eps == tc.points[i].eps);

  const auto s = surface(curve, interior_grid(0.0, curve.p_star(), 10), linear_grid(0.0, 1.0, 3));
  const auto s2 = surface_from_json(surface_to_json(s, curve.label()));
  REQUIRE(s2.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s2[i].r == s[i].r);
}

TEST_CASE("run config checks") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.check());
  cfg.dt = 0.0;  // only the trajectory command integrates
  CHECK_NOTHROW(cfg.check());
  cfg.command = Command::kTrajectory;
  CHECK_THROWS_AS(cfg.check(), ParameterError);
  cfg = RunConfig{};
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.check(), ParameterError);
  cfg = RunConfig{};
  cfg.threads = 0;
  CHECK_THROWS_AS(cfg.check(), ParameterError);
  cfg = RunConfig{};
  cfg.range_min = 0.6;
  cfg.range_max = 0.4;
  CHECK_THROWS_AS(cfg.check(), ParameterError);
}
