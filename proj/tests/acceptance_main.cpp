// Acceptance driver: one PASS/FAIL line per criterion, followed by its checks.
#include <CLI11.hpp>

#include <string>
#include <iostream>
#include <thread>

#include "fraclap/acceptance.hpp"

int main(int argc, char** argv) {
  namespace acc = fraclap::acceptance;
  CLI::App app{"acceptance criteria"};
  std::vector<int> ids;
  acc::Options opts;
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  bool json = false;
  app.add_option("--criterion", ids, "criteria to run (default: all)")->check(CLI::Range(1, acc::criterion_count()));
  app.add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "seed for randomized checks");
  app.add_flag("--json", json, "also print a JSON record per criterion");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= acc::criterion_count(); ++i) ids.push_back(i);

  bool all = true;
  std::vector<std::string> lines;
  for (int id : ids) {
    const acc::CriterionResult r = acc::run_criterion(id, opts);
    std::cout << acc::format_result(r);
    if (json) std::cout << acc::to_json(r).dump() << "\n";
    std::cout.flush();
    all = all && r.pass;
    lines.push_back("criterion " + std::to_string(id) + ": " + (r.pass ? "PASS" : "FAIL") + "  " + r.title);
  }
  if (ids.size() > 1) {
    std::cout << "\nsummary\n";
    for (const auto& l : lines) std::cout << l << "\n";
  }
  return all ? 0 : 1;
}
