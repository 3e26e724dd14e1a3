#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclap/io.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fraclap_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("plain solve flags") {
  const RunConfig c = parse_args({"solve", "--N", "1", "--s", "0.5", "--alpha", "1"});
  CHECK(c.command == "solve");
  CHECK(c.N == 1);
  CHECK(c.s == 0.5);
  CHECK(c.alpha == 1.0);
  CHECK_FALSE(c.R.has_value());
}

TEST_CASE("inadmissible exponent is rejected with the bound") {
  try {
    parse_args({"solve", "--N", "3", "--s", "0.5", "--alpha", "2.5"});
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    const std::string m = e.what();
    CHECK(m.find("alpha_*") != std::string::npos);
    CHECK(m.find(") = 1") != std::string::npos);
    CHECK_FALSE(e.help());
  }
  // the same exponent is fine for commands that do not solve the profile equation
  CHECK_NOTHROW(parse_args({"resolvent", "--N", "3", "--s", "0.5", "--alpha", "2.5"}));
  // continuation checks both ends
  CHECK_THROWS_AS(parse_args({"continue", "--N", "3", "--alpha", "1.2", "--s-start", "1", "--s-end", "0.5"}),
                  UsageError);
}

TEST_CASE("unknown flags and bad values") {
  CHECK_THROWS_AS(parse_args({"solve", "--bogus", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--s", "1.5"}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--M", "4"}), UsageError);
  CHECK_THROWS_AS(parse_args({"verify-all", "--criterion", "13"}), UsageError);
  try {
    parse_args({"--help"});
    FAIL("expected help");
  } catch (const UsageError& e) {
    CHECK(e.help());
    CHECK(std::string(e.what()).find("verify-all") != std::string::npos);
  }
}

TEST_CASE("config file sits under explicit flags") {
  const fs::path dir = scratch_dir("config");
  const fs::path cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"N": 2, "s": 0.4, "alpha": 1.1, "R": 50, "output": "from_file"})";
  const RunConfig c = parse_args({"solve", "--config", cfg.string(), "--s", "0.6"});
  CHECK(c.s == 0.6);
  CHECK(c.N == 2);
  CHECK(c.alpha == 1.1);
  CHECK(c.R.value() == 50.0);
  CHECK(c.output == "from_file");
  CHECK(c.config_path.value() == cfg.string());

  std::ofstream(dir / "bad.json") << R"({"N": 2, "colour": "red"})";
  CHECK_THROWS_AS(parse_args({"solve", "--config", (dir / "bad.json").string()}), UsageError);
  CHECK_THROWS_AS(parse_args({"solve", "--config", (dir / "missing.json").string()}), UsageError);
}

TEST_CASE("output directory precedence: flag over file over environment") {
  const fs::path dir = scratch_dir("env");
  ::setenv("FRACLAP_OUTPUT", "from_env", 1);
  CHECK(parse_args({"solve"}).output == "from_env");
  std::ofstream(dir / "o.json") << R"({"output": "from_file"})";
  CHECK(parse_args({"solve", "--config", (dir / "o.json").string()}).output == "from_file");
  CHECK(parse_args({"solve", "--config", (dir / "o.json").string(), "--output", "flag"}).output == "flag");
  ::unsetenv("FRACLAP_OUTPUT");
  CHECK(parse_args({"solve"}).output == "fraclap_out");
}

TEST_CASE("number format carries 17 significant digits") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(format_number(-2.0) == "-2.0000000000000000e+00");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv layout") {
  CsvTable t{"t", {"r", "Q"}, {{0.0, 2.0}, {1.0, 1.0}}};
  CHECK(csv_string(t) ==
        "r,Q\n0.0000000000000000e+00,2.0000000000000000e+00\n1.0000000000000000e+00,1.0000000000000000e+00\n");
  t.rows.push_back({1.0});
  CHECK_THROWS(csv_string(t));
}

TEST_CASE("emitted files are deterministic") {
  const fs::path a = scratch_dir("emit_a"), b = scratch_dir("emit_b");
  Results r;
  r.summary["value"] = 0.1;
  r.summary["nested"] = {{"x", 1}, {"y", "z"}};
  r.tables.push_back({"Q_profile", {"r", "Q"}, {{0.5, 1.6}}});
  RunConfig c = parse_args({"solve", "--seed", "7"});
  c.output = a.string();
  emit_results(r, c);
  c.output = b.string();
  emit_results(r, c);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "Q_profile.csv") == slurp(b / "Q_profile.csv"));
  CHECK(slurp(a / "Q_profile.csv").rfind("r,Q\n", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(j["config"]["seed"] == 7);
  CHECK(j["pass"] == true);
  CHECK_FALSE(j["config"].contains("output"));
}

TEST_CASE("unwritable output directory") {
  const fs::path dir = scratch_dir("blocked");
  std::ofstream(dir / "file") << "x";
  RunConfig c = parse_args({"solve"});
  c.output = (dir / "file" / "sub").string();
  CHECK_THROWS_AS(emit_results(Results{}, c), std::runtime_error);
}
