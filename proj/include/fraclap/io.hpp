#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fraclap {

// Raised for unknown flags, bad values and inadmissible parameters. help() is
// set when the user asked for usage text; message() then holds it.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& msg, bool help = false) : std::runtime_error(msg), help_(help) {}
  bool help() const { return help_; }

 private:
  bool help_;
};

struct RunConfig {
  std::string command;  // solve, spectrum, continue, extend, resolvent, homotopy, verify-all
  int N = 1;
  double s = 0.5;
  double alpha = 1.0;
  std::optional<double> R;
  std::optional<int> M;
  std::optional<double> tol;
  std::string output = "fraclap_out";
  std::optional<std::string> config_path;
  int jobs = 1;
  std::uint64_t seed = 20240917;
  // continue
  double s_start = 1.0;
  double s_end = 0.5;
  double step = 0.01;
  // resolvent
  double lambda = 1.0;
  // homotopy
  int steps = 32;
  // verify-all subset (empty: all)
  std::vector<int> criteria;

  nlohmann::json to_json() const;
  // true for commands that solve the nonlinear profile equation
  bool uses_alpha() const;
};

extern const std::vector<std::string> kCommands;

// argv[0] is the program name. A JSON file given by --config is merged under
// explicit flags. FRACLAP_OUTPUT sets the default output directory.
RunConfig parse_args(int argc, const char* const* argv);
RunConfig parse_args(const std::vector<std::string>& args);  // without program name

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Results {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<CsvTable> tables;
  bool pass = true;
};

// scientific notation with 17 significant digits
std::string format_number(double x);
std::string csv_string(const CsvTable& t);

// Writes summary.json and <name>.csv for every table into config.output.
// Throws std::runtime_error if the directory cannot be created or written.
void emit_results(const Results& results, const RunConfig& config);

// summary.json text: config, pass flag and results; no timings
std::string summary_string(const Results& results, const RunConfig& config);

}  // namespace fraclap
