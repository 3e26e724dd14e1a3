#include <cmath>
#include <iostream>
#include <string>

#include "fraclap/acceptance.hpp"
#include "fraclap/continuation.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/extension.hpp"
#include "fraclap/ground_state.hpp"
#include "fraclap/io.hpp"
#include "fraclap/linearized.hpp"
#include "fraclap/resolvent.hpp"
#include "fraclap/schrodinger.hpp"

using namespace fraclap;
using nlohmann::json;

namespace {

GridPtr grid_for(const RunConfig& c, double R, int M) {
  return make_grid(SectorIndex{c.N, 0}, c.R.value_or(R), c.M.value_or(M));
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  if (c.tol) o.tol = *c.tol;
  return o;
}

json ground_state_json(const GroundState& gs) {
  json j;
  j["N"] = gs.params.N;
  j["s"] = gs.params.s;
  j["alpha"] = gs.params.alpha;
  j["R"] = gs.Q.grid()->radius();
  j["M_modes"] = gs.Q.grid()->size();
  j["converged"] = gs.converged;
  j["residual"] = gs.residual;
  j["petviashvili_iterations"] = gs.petviashvili_iterations;
  j["newton_iterations"] = gs.newton_iterations;
  j["Q0"] = gs.Q.value_at_origin();
  j["mass"] = gs.M;
  j["kinetic"] = gs.T;
  j["potential"] = gs.V;
  j["pohozaev1_residual"] = gs.pohozaev1_residual;
  j["pohozaev2_residual"] = gs.pohozaev2_residual;
  j["weinstein_J"] = gs.weinstein_J;
  if (std::isfinite(gs.tail_constant)) {
    j["tail_constant"] = gs.tail_constant;
    j["tail_residual"] = gs.tail_residual;
  } else {
    j["tail_constant"] = nullptr;
  }
  return j;
}

CsvTable profile_table(const RadialField& Q, const std::string& name, const std::string& col) {
  CsvTable t{name, {"r", col}, {}};
  for (int q = 0; q < Q.size(); ++q) t.rows.push_back({Q.grid()->nodes()[q], Q.values()[q]});
  return t;
}

Results run_solve(const RunConfig& c) {
  const GroundState gs = solve_ground_state(ProblemParams{c.N, c.s, c.alpha}, grid_for(c, 200.0, 1024), std::nullopt,
                                            solve_options(c));
  Results r;
  r.summary["ground_state"] = ground_state_json(gs);
  r.pass = gs.converged;
  r.tables.push_back(profile_table(gs.Q, "Q_profile", "Q"));
  return r;
}

Results run_spectrum(const RunConfig& c) {
  const GroundState gs = solve_ground_state(ProblemParams{c.N, c.s, c.alpha}, grid_for(c, 60.0, 1024), std::nullopt,
                                            solve_options(c));
  const NondegeneracyReport rep = nondegeneracy_report(gs, 3);
  Results r;
  r.summary["ground_state"] = ground_state_json(gs);
  r.summary["zero_tol"] = rep.zero_tol;
  r.summary["ordered"] = rep.ordered;
  json secs = json::array();
  CsvTable eig{"spectrum", {"ell", "index", "eigenvalue"}, {}};
  for (const auto& sr : rep.sectors) {
    secs.push_back({{"ell", sr.sector.ell},
                    {"lowest", sr.lowest},
                    {"second", sr.second},
                    {"distance_to_zero", sr.distance_to_zero},
                    {"negative_count", sr.negative_count},
                    {"zero_modes", sr.zero_modes},
                    {"qprime_cosine", sr.qprime_cosine},
                    {"pass", sr.pass}});
    eig.rows.push_back({double(sr.sector.ell), 0.0, sr.lowest});
    eig.rows.push_back({double(sr.sector.ell), 1.0, sr.second});
  }
  r.summary["sectors"] = secs;
  r.summary["nondegenerate"] = rep.pass;
  r.pass = gs.converged && rep.pass;
  // radial eigenfunctions of L_+
  const SectorOperator L = assemble_lplus(gs, SectorIndex{c.N, 0});
  const SectorSpectrum sp = sector_spectrum(L, 2, rep.zero_tol);
  CsvTable ef{"lplus_eigenfunctions", {"r", "psi1", "psi2"}, {}};
  for (int q = 0; q < gs.Q.size(); ++q)
    ef.rows.push_back({gs.Q.grid()->nodes()[q], sp.eigenfields[0].values()[q], sp.eigenfields[1].values()[q]});
  r.summary["radial_sign_changes"] = {sign_changes(sp.eigenfields[0]), sign_changes(sp.eigenfields[1])};
  r.tables.push_back(std::move(eig));
  r.tables.push_back(std::move(ef));
  r.tables.push_back(profile_table(gs.Q, "Q_profile", "Q"));
  return r;
}

Results run_continue(const RunConfig& c) {
  BranchOptions bo;
  bo.solve = solve_options(c);
  Branch b = continue_branch(c.N, c.alpha, c.s_start, c.s_end, c.step, grid_for(c, 400.0, 2048), bo);
  const double gap = mass_derivative_check(b);
  Results r;
  json pts = json::array();
  bool morse = true;
  CsvTable tab{"branch", {"s", "M", "T", "V", "dMds_analytic", "dMds_numeric", "morse_index"}, {}};
  for (const auto& p : b.points) {
    morse = morse && p.morse_index == 1;
    pts.push_back({{"s", p.s},
                   {"mass", p.M},
                   {"kinetic", p.T},
                   {"potential", p.V},
                   {"morse_index", p.morse_index},
                   {"min_abs_eig", p.min_abs_eig},
                   {"tangent_residual", p.tangent_residual},
                   {"corrector_iterations", p.corrector_iterations},
                   {"dMds_analytic", p.dMds_analytic},
                   {"dMds_numeric", std::isfinite(p.dMds_numeric) ? json(p.dMds_numeric) : json(nullptr)},
                   {"mass_gap", std::isfinite(p.mass_gap) ? json(p.mass_gap) : json(nullptr)},
                   {"tail_bound", p.tail_bound}});
    tab.rows.push_back({p.s, p.M, p.T, p.V, p.dMds_analytic, p.dMds_numeric, double(p.morse_index)});
  }
  r.summary["points"] = pts;
  r.summary["max_mass_gap"] = gap;
  r.summary["morse_index_one"] = morse;
  r.pass = morse && gap < 1e-3;
  r.tables.push_back(std::move(tab));
  r.tables.push_back(profile_table(b.points.back().gs.Q, "Q_endpoint", "Q"));
  return r;
}

Results run_extend(const RunConfig& c) {
  if (c.s >= 1.0) throw UsageError("extend requires s < 1");
  const GroundState gs = solve_ground_state(ProblemParams{c.N, c.s, c.alpha}, grid_for(c, 40.0, 256), std::nullopt,
                                            solve_options(c));
  Results r;
  r.summary["ground_state"] = ground_state_json(gs);
  const ExtensionField ext = extend(gs.Q, c.s, default_levels(*gs.Q.grid(), c.s));
  const DirichletNeumann dn = dirichlet_neumann_check(gs.Q, c.s);
  const TraceReport tr = trace_inequality_check(gs.Q, c.s);
  r.summary["collocation_residual"] = ext.collocation_residual;
  r.summary["dirichlet_neumann_residual"] = dn.residual;
  r.summary["trace_ratio"] = tr.ratio;
  r.pass = gs.converged && dn.residual < 1e-6 && std::abs(tr.ratio - 1.0) < 1e-4;
  // H(r) with the Q equation read as a Schrodinger problem: ((-Delta)^s + 1 - Q^alpha) Q = 0
  Eigen::VectorXd Vq = 1.0 - gs.Q.values().array().abs().pow(c.alpha);
  const MonotoneH h = monotone_H(gs.Q, RadialField::from_values(gs.Q.grid(), Vq), c.s);
  r.summary["H0"] = h.H0;
  r.summary["H_max_increase"] = h.max_increase;
  CsvTable ht{"H_profile", {"r", "H"}, {}};
  for (std::size_t i = 0; i < h.radii.size(); ++i) ht.rows.push_back({h.radii[i], h.H_values[i]});
  CsvTable ut{"extension", {"r", "t", "u"}, {}};
  const int stride = std::max(1, gs.Q.size() / 64);
  for (int q = 0; q < gs.Q.size(); q += stride)
    for (std::size_t j = 0; j < ext.levels.size(); ++j) ut.rows.push_back({gs.Q.grid()->nodes()[q], ext.levels[j], ext.u(q, j)});
  r.tables.push_back(std::move(ht));
  r.tables.push_back(std::move(ut));
  return r;
}

Results run_resolvent(const RunConfig& c) {
  if (c.s >= 1.0) throw UsageError("resolvent requires s < 1");
  const KernelProfile kp = resolvent_kernel(c.s, c.lambda, c.N, log_radii(1e-3, 1e5, 12));
  Results r;
  r.summary["lambda"] = c.lambda;
  r.summary["l1_norm"] = kp.l1_norm;
  r.summary["l1_error"] = std::abs(c.lambda * kp.l1_norm - 1.0);
  r.summary["tail_constant"] = kp.tail_constant;
  r.summary["tail_residual"] = kp.tail_residual;
  bool ok = true;
  CsvTable t{"kernel", {"r", "G", "r^(N+2s) G"}, {}};
  for (std::size_t i = 0; i < kp.radii.size(); ++i) {
    ok = ok && kp.values[i] > 0.0 && (i == 0 || kp.values[i] < kp.values[i - 1]);
    t.rows.push_back({kp.radii[i], kp.values[i], std::pow(kp.radii[i], c.N + 2.0 * c.s) * kp.values[i]});
  }
  r.summary["positive_decreasing"] = ok;
  r.pass = ok && std::abs(c.lambda * kp.l1_norm - 1.0) < 1e-4;
  r.tables.push_back(std::move(t));
  return r;
}

Results run_homotopy(const RunConfig& c) {
  const double s0 = c.s;
  const auto grid = grid_for(c, 30.0, 384);
  double gW = 0.0;
  for (int k = 0; k <= 10; ++k) gW = std::max(gW, trial_coupling_bound(s0 + (1.0 - s0) * k / 10.0, c.N));
  const PotentialSpec W = PotentialSpec::gaussian(1.25 * gW);
  const PotentialSpec V = PotentialSpec::gaussian(1.25 * trial_coupling_bound(s0, c.N) / std::pow(4.0, s0), 2.0);
  const auto run = homotopy_run(s0, V, W, grid, HomotopyOptions{c.steps});
  Results r;
  r.summary["s0"] = s0;
  r.summary["W_coupling"] = W.coupling();
  r.summary["V_coupling"] = V.coupling();
  r.summary["V_width"] = V.width();
  r.summary["max_eigenvalue_jump"] = max_eigenvalue_jump(run);
  json trace = json::array();
  CsvTable t{"homotopy", {"kappa", "leg", "s_kappa", "E1", "E2", "sign_changes"}, {}};
  bool ok = true;
  for (const auto& st : run) {
    ok = ok && st.E1 < st.E2 && st.E2 < 0.0 && st.sign_changes == 1;
    trace.push_back({{"kappa", st.kappa}, {"E1", st.E1}, {"E2", st.E2}, {"sign_changes", st.sign_changes}});
    t.rows.push_back({st.kappa, double(st.leg), st.s_kappa, st.E1, st.E2, double(st.sign_changes)});
  }
  r.summary["trace"] = trace;
  r.pass = ok;
  CsvTable ef{"psi2_final", {"r", "psi2"}, {}};
  for (int q = 0; q < grid->size(); ++q) ef.rows.push_back({grid->nodes()[q], run.back().psi2.values()[q]});
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(ef));
  return r;
}

Results run_verify_all(const RunConfig& c) {
  acceptance::Options o;
  o.jobs = c.jobs;
  o.seed = c.seed;
  std::vector<int> ids = c.criteria;
  if (ids.empty())
    for (int i = 1; i <= acceptance::criterion_count(); ++i) ids.push_back(i);
  Results r;
  json arr = json::array();
  for (int id : ids) {
    auto res = acceptance::run_criterion(id, o);
    std::cout << acceptance::format_result(res) << std::flush;
    arr.push_back(acceptance::to_json(res));
    r.pass = r.pass && res.pass;
    for (auto& t : res.tables) {
      t.name = "criterion" + std::to_string(id) + "_" + t.name;
      r.tables.push_back(std::move(t));
    }
  }
  r.summary["criteria"] = arr;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  try {
    c = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.help() ? std::cout : std::cerr) << e.what() << "\n";
    return e.help() ? 0 : 2;
  }
  try {
    Results r;
    if (c.command == "solve") r = run_solve(c);
    else if (c.command == "spectrum") r = run_spectrum(c);
    else if (c.command == "continue") r = run_continue(c);
    else if (c.command == "extend") r = run_extend(c);
    else if (c.command == "resolvent") r = run_resolvent(c);
    else if (c.command == "homotopy") r = run_homotopy(c);
    else r = run_verify_all(c);
    emit_results(r, c);
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << c.command << "  -> " << c.output << "/summary.json\n";
    return r.pass ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
