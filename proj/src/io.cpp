#include "fraclap/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fraclap/ground_state.hpp"

namespace fraclap {

const std::vector<std::string> kCommands = {"solve",     "spectrum", "continue",  "extend",
                                            "resolvent", "homotopy", "verify-all"};

bool RunConfig::uses_alpha() const {
  return command == "solve" || command == "spectrum" || command == "continue" || command == "extend";
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["N"] = N;
  j["s"] = s;
  j["alpha"] = alpha;
  j["R"] = R ? nlohmann::json(*R) : nlohmann::json(nullptr);
  j["M"] = M ? nlohmann::json(*M) : nlohmann::json(nullptr);
  j["tol"] = tol ? nlohmann::json(*tol) : nlohmann::json(nullptr);
  j["jobs"] = jobs;
  j["seed"] = seed;
  j["s_start"] = s_start;
  j["s_end"] = s_end;
  j["step"] = step;
  j["lambda"] = lambda;
  j["steps"] = steps;
  j["criteria"] = criteria;
  return j;
}

namespace {

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

template <class T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

void merge_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
  static const std::vector<std::string> known = {"command", "N",     "s",     "alpha",  "R",         "M",
                                                 "tol",     "output", "jobs", "seed",   "s_start",   "s_end",
                                                 "step",    "lambda", "steps", "criteria"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw UsageError("config file " + path + ": unknown key '" + it.key() + "'");
  try {
    take(j, "N", c.N);
    take(j, "s", c.s);
    take(j, "alpha", c.alpha);
    take(j, "R", c.R);
    take(j, "M", c.M);
    take(j, "tol", c.tol);
    take(j, "output", c.output);
    take(j, "jobs", c.jobs);
    take(j, "seed", c.seed);
    take(j, "s_start", c.s_start);
    take(j, "s_end", c.s_end);
    take(j, "step", c.step);
    take(j, "lambda", c.lambda);
    take(j, "steps", c.steps);
    take(j, "criteria", c.criteria);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

void validate(const RunConfig& c) {
  if (c.N < 1) throw UsageError("--N must be at least 1");
  if (!(c.s > 0.0 && c.s <= 1.0)) throw UsageError("--s must lie in (0, 1]");
  if (!(c.alpha > 0.0)) throw UsageError("--alpha must be positive");
  if (c.R && !(*c.R > 0.0)) throw UsageError("--R must be positive");
  if (c.M && *c.M < 8) throw UsageError("--M must be at least 8");
  if (c.tol && !(*c.tol > 0.0)) throw UsageError("--tol must be positive");
  if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (!(c.lambda > 0.0)) throw UsageError("--lambda must be positive");
  if (c.steps < 1) throw UsageError("--steps must be positive");
  for (int k : c.criteria)
    if (k < 1 || k > 12) throw UsageError("criteria must lie in 1..12");
  if (c.uses_alpha()) {
    std::vector<double> orders{c.s};
    if (c.command == "continue") orders = {c.s_start, c.s_end};
    for (double s : orders) {
      if (!(s > 0.0 && s <= 1.0)) throw UsageError("s values must lie in (0, 1]");
      try {
        ProblemParams{c.N, s, c.alpha}.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"fraclap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Fractional Laplacian ground states, spectra and extensions"};
  app.require_subcommand(1, 1);
  app.allow_extras(false);

  RunConfig flags;
  struct Handles {
    CLI::Option *N, *s, *alpha, *R, *M, *tol, *output, *config, *jobs, *seed, *s_start, *s_end, *step, *lambda,
        *steps, *criteria;
  };
  std::map<std::string, Handles> handles;
  double R = 0, tol = 0;
  int M = 0;
  std::string config;
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, "");
    Handles h{};
    h.N = sub->add_option("--N", flags.N, "spatial dimension");
    h.s = sub->add_option("--s", flags.s, "fractional order in (0,1]");
    h.alpha = sub->add_option("--alpha", flags.alpha, "nonlinearity exponent");
    h.R = sub->add_option("--R", R, "ball radius");
    h.M = sub->add_option("--M", M, "number of modes");
    h.tol = sub->add_option("--tol", tol, "solver tolerance");
    h.output = sub->add_option("--output", flags.output, "output directory");
    h.config = sub->add_option("--config", config, "JSON config file (flags win)");
    h.jobs = sub->add_option("--jobs", flags.jobs, "worker threads");
    h.seed = sub->add_option("--seed", flags.seed, "seed for randomized checks");
    h.s_start = sub->add_option("--s-start", flags.s_start, "continue: first order");
    h.s_end = sub->add_option("--s-end", flags.s_end, "continue: last order");
    h.step = sub->add_option("--step", flags.step, "continue: step in s");
    h.lambda = sub->add_option("--lambda", flags.lambda, "resolvent: spectral parameter");
    h.steps = sub->add_option("--steps", flags.steps, "homotopy: knots per leg");
    h.criteria = sub->add_option("--criterion", flags.criteria, "verify-all: criteria to run");
    handles[name] = h;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), true);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), true);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n" + app.help());
  }

  RunConfig c;
  for (const auto& name : kCommands)
    if (app.got_subcommand(name)) c.command = name;
  const Handles& h = handles.at(c.command);
  if (const char* env = std::getenv("FRACLAP_OUTPUT"); env && *env) c.output = env;
  if (h.config->count()) {
    c.config_path = config;
    merge_file(c, config);
  }
  if (h.N->count()) c.N = flags.N;
  if (h.s->count()) c.s = flags.s;
  if (h.alpha->count()) c.alpha = flags.alpha;
  if (h.R->count()) c.R = R;
  if (h.M->count()) c.M = M;
  if (h.tol->count()) c.tol = tol;
  if (h.output->count()) c.output = flags.output;
  if (h.jobs->count()) c.jobs = flags.jobs;
  if (h.seed->count()) c.seed = flags.seed;
  if (h.s_start->count()) c.s_start = flags.s_start;
  if (h.s_end->count()) c.s_end = flags.s_end;
  if (h.step->count()) c.step = flags.step;
  if (h.lambda->count()) c.lambda = flags.lambda;
  if (h.steps->count()) c.steps = flags.steps;
  if (h.criteria->count()) c.criteria = flags.criteria;
  validate(c);
  return c;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string csv_string(const CsvTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::invalid_argument("csv row width mismatch in " + t.name);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string summary_string(const Results& results, const RunConfig& config) {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["pass"] = results.pass;
  j["results"] = results.summary;
  return j.dump(2) + "\n";
}

void emit_results(const Results& results, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  auto write = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
  };
  write(dir / "summary.json", summary_string(results, config));
  for (const auto& t : results.tables) write(dir / (t.name + ".csv"), csv_string(t));
}

}  // namespace fraclap
