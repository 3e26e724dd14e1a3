#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclap/io.hpp"

namespace fraclap::acceptance {

// One lattice point (N, s, alpha) with the grids used for the identity checks
// (Pohozaev) and for the dense spectral checks.
struct LatticePoint {
  int N = 1;
  double s = 0.5;
  double alpha = 1.0;
  double R_identity = 0.0;
  int M_identity = 0;
  double R_spectral = 0.0;
  int M_spectral = 0;
};

// N in {1,2,3} x s in {0.5,0.7,0.9} x alpha in {1, min(2, 0.9 alpha_*)},
// admissible points only, duplicates merged
std::vector<LatticePoint> lattice();

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 20240917;
  int jobs = 1;
  bool verbose = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  bool pass = false;
  std::string error;  // set if the run threw
  double seconds = 0.0;
  std::vector<CsvTable> tables;
};

int criterion_count();
std::string criterion_title(int id);
CriterionResult run_criterion(int id, const Options& opts = {});

// "criterion 3: PASS  ..." followed by one indented line per check
std::string format_result(const CriterionResult& r);
// JSON without timings
nlohmann::json to_json(const CriterionResult& r);

}  // namespace fraclap::acceptance
