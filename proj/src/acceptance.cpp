#include "fraclap/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "fraclap/continuation.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/extension.hpp"
#include "fraclap/ground_state.hpp"
#include "fraclap/linearized.hpp"
#include "fraclap/resolvent.hpp"
#include "fraclap/schrodinger.hpp"
#include "fraclap/special.hpp"

namespace fraclap::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string point_name(int N, double s, double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "N=%d s=%.2g alpha=%.4g", N, s, alpha);
  return buf;
}

std::string point_name(const LatticePoint& p) { return point_name(p.N, p.s, p.alpha); }

// value <= tol
void upper(std::vector<Check>& out, std::string name, double value, double tol, std::string detail = {}) {
  out.push_back({std::move(name), value, tol, value <= tol, std::move(detail)});
}
// value >= tol
void lower(std::vector<Check>& out, std::string name, double value, double tol, std::string detail = {}) {
  out.push_back({std::move(name), value, tol, value >= tol, std::move(detail)});
}
void flag(std::vector<Check>& out, std::string name, bool ok, std::string detail = {}) {
  out.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)});
}

// runs f(i) for i in [0, n) on up to jobs threads; results keep index order
template <class T>
std::vector<T> parallel_map(int n, int jobs, const std::function<T(int)>& f) {
  std::vector<T> out(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) out[i] = f(i);
  };
  const int k = std::max(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

// Ground states shared between criteria within one process
class GroundStateCache {
 public:
  std::shared_ptr<const GroundState> get(int N, double s, double alpha, double R, int M, double* seconds = nullptr) {
    const auto key = std::make_tuple(N, s, alpha, R, M);
    std::shared_future<std::pair<std::shared_ptr<const GroundState>, double>> fut;
    bool owner = false;
    std::promise<std::pair<std::shared_ptr<const GroundState>, double>> prom;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it == map_.end()) {
        fut = prom.get_future().share();
        map_.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        const auto t0 = Clock::now();
        auto grid = make_grid(SectorIndex{N, 0}, R, M);
        auto gs = std::make_shared<const GroundState>(solve_ground_state(ProblemParams{N, s, alpha}, grid));
        prom.set_value({gs, seconds_since(t0)});
      } catch (...) {
        prom.set_exception(std::current_exception());
      }
    }
    auto [gs, t] = fut.get();
    if (seconds) *seconds = t;
    return gs;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, double, double, double, int>,
           std::shared_future<std::pair<std::shared_ptr<const GroundState>, double>>>
      map_;
};

GroundStateCache& cache() {
  static GroundStateCache c;
  return c;
}

std::shared_ptr<const GroundState> spectral_state(const LatticePoint& p) {
  return cache().get(p.N, p.s, p.alpha, p.R_spectral, p.M_spectral);
}

// radial L_+ eigenpairs below 1 - 10/R^2, the discrete part on the ball
struct RadialLplus {
  std::vector<double> E;
  std::vector<RadialField> psi;
  RadialField potential;  // 1 - (alpha+1) Q^alpha
  double min_gap = 0.0;
};

RadialLplus radial_lplus(const GroundState& gs) {
  const SectorOperator L = assemble_lplus(gs, SectorIndex{gs.params.N, 0});
  const SectorSpectrum sp = sector_spectrum(L, 6, zero_tolerance(*gs.Q.grid(), gs.params.s));
  RadialLplus out;
  const double R = gs.Q.grid()->radius(), cut = 1.0 - 10.0 / (R * R);
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
    if (sp.eigenvalues[i] < cut) {
      out.E.push_back(sp.eigenvalues[i]);
      out.psi.push_back(sp.eigenfields[i]);
    }
  // the +1 sits in the symbol of L_+; the Schrodinger potential carries it
  out.potential = RadialField::from_values(gs.Q.grid(), L.potential().array() + 1.0);
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.E.size(); ++i) out.min_gap = std::min(out.min_gap, out.E[i] - out.E[i - 1]);
  return out;
}

// Gaussian well -g e^{-r^2} whose coupling exceeds the trial-matrix bound for every order in [s_lo, 1]
double well_coupling(int N, double s_lo) {
  double g = 0.0;
  for (int k = 0; k <= 10; ++k) g = std::max(g, trial_coupling_bound(s_lo + (1.0 - s_lo) * k / 10.0, N));
  return 1.25 * g;
}

constexpr double kWellR = 30.0;
constexpr int kWellM = 512;

double psi0_ratio(const RadialField& psi) { return std::abs(psi.value_at_origin()) / psi.values().cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- criterion 1
CriterionResult bo_soliton(const Options&) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const auto grid = make_grid(SectorIndex{1, 0}, 200.0, 1024);
  const GroundState gs = solve_ground_state(ProblemParams{1, 0.5, 1.0}, grid);
  const double dt = seconds_since(t0);
  double err = 0.0;
  CsvTable tab{"bo_profile", {"r", "Q", "Q_exact"}, {}};
  for (int q = 0; q < grid->size(); ++q) {
    const double x = grid->nodes()[q], ex = 2.0 / (1.0 + x * x);
    err = std::max(err, std::abs(gs.Q.values()[q] - ex));
    tab.rows.push_back({x, gs.Q.values()[q], ex});
  }
  err /= 2.0;
  flag(r.checks, "Newton converged", gs.converged, "residual " + fmt("%.2e", gs.residual));
  upper(r.checks, "max |Q - 2/(1+r^2)| / max Q", err, 1e-3, "R=200 M=1024");
  upper(r.checks, "runtime [s]", dt, 60.0);
  r.tables.push_back(std::move(tab));
  return r;
}

// ---------------------------------------------------------------- criterion 2
CriterionResult pohozaev(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  struct Out {
    std::vector<Check> checks;
    std::vector<double> row;
  };
  auto res = parallel_map<Out>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    Out out;
    const std::string name = point_name(p);
    try {
      double dt = 0.0;
      const auto gs = cache().get(p.N, p.s, p.alpha, p.R_identity, p.M_identity, &dt);
      const std::string grid = "R=" + fmt("%g", p.R_identity) + " M=" + std::to_string(p.M_identity);
      flag(out.checks, name + ": converged", gs->converged, "residual " + fmt("%.2e", gs->residual));
      upper(out.checks, name + ": T+M=V relative residual", gs->pohozaev1_residual, 1e-6, grid);
      upper(out.checks, name + ": second identity relative residual", gs->pohozaev2_residual, 1e-6, grid);
      upper(out.checks, name + ": solve time [s]", dt, 120.0);
      out.row = {double(p.N), p.s, p.alpha, p.R_identity, double(p.M_identity), gs->M, gs->T, gs->V,
                 gs->pohozaev1_residual, gs->pohozaev2_residual};
    } catch (const std::exception& e) {
      flag(out.checks, name + ": solve", false, e.what());
    }
    return out;
  });
  CsvTable tab{"pohozaev", {"N", "s", "alpha", "R", "M", "mass", "kinetic", "potential", "res1", "res2"}, {}};
  for (auto& x : res) {
    r.checks.insert(r.checks.end(), x.checks.begin(), x.checks.end());
    if (!x.row.empty()) tab.rows.push_back(x.row);
  }
  r.tables.push_back(std::move(tab));
  return r;
}

// ---------------------------------------------------------------- criterion 3
CriterionResult nondegeneracy(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    std::vector<Check> c;
    const std::string name = point_name(p);
    try {
      const auto t0 = Clock::now();
      const auto gs = spectral_state(p);
      const NondegeneracyReport rep = nondegeneracy_report(*gs, 3);
      const double dt = seconds_since(t0);
      for (const auto& sr : rep.sectors) {
        const std::string sn = name + " l=" + std::to_string(sr.sector.ell);
        if (sr.sector.ell == 0) {
          flag(c, sn + ": exactly one negative eigenvalue", sr.negative_count == 1,
               std::to_string(sr.negative_count) + " negative, lowest " + fmt("%.6g", sr.lowest));
          lower(c, sn + ": distance of spectrum to zero", sr.distance_to_zero, 1e-4);
        } else if (sr.sector.ell == 1) {
          flag(c, sn + ": one zero mode", sr.zero_modes == 1 && sr.negative_count == 0,
               "lowest " + fmt("%.3e", sr.lowest) + ", next " + fmt("%.6g", sr.second) + ", zero_tol " +
                   fmt("%.1e", rep.zero_tol));
          lower(c, sn + ": cosine(zero mode, Q')", sr.qprime_cosine, 1.0 - 1e-6);
        } else {
          lower(c, sn + ": lowest eigenvalue", sr.lowest, rep.zero_tol, "strictly positive");
        }
      }
      if (p.N == 1) flag(c, name + ": sectors l=2,3", true, "not present in one dimension");
      upper(c, name + ": runtime [s]", dt, 300.0,
            "R=" + fmt("%g", p.R_spectral) + " M=" + std::to_string(p.M_spectral));
    } catch (const std::exception& e) {
      flag(c, name, false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  return r;
}

// ---------------------------------------------------------------- criterion 4
CriterionResult oscillation(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    std::vector<Check> c;
    const std::string name = point_name(p) + " L_+";
    try {
      const RadialLplus lp = radial_lplus(*spectral_state(p));
      const int n0 = sign_changes(lp.psi.at(0));
      flag(c, name + ": lowest eigenfunction sign changes = 0", n0 == 0, std::to_string(n0));
      if (lp.E.size() > 1) {
        const int n1 = sign_changes(lp.psi[1]);
        flag(c, name + ": second eigenfunction sign changes = 1", n1 == 1,
             std::to_string(n1) + " (E2 = " + fmt("%.6g", lp.E[1]) + ")");
      } else {
        flag(c, name + ": second discrete eigenvalue", true, "none below 1 - 10/R^2; nothing to check");
      }
    } catch (const std::exception& e) {
      flag(c, name, false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  for (int N = 1; N <= 3; ++N) {
    const double g = well_coupling(N, 0.5);
    const auto grid = make_grid(SectorIndex{N, 0}, kWellR, kWellM);
    for (double s : {0.5, 0.75, 1.0}) {
      const std::string name = "well N=" + std::to_string(N) + " s=" + fmt("%g", s) + " g=" + fmt("%.4g", g);
      const RadialSpectrum sp = radial_spectrum(s, PotentialSpec::gaussian(g), grid, 2);
      const auto& e = sp.spectrum.eigenvalues;
      flag(r.checks, name + ": two negative eigenvalues", e[0] < e[1] && e[1] < 0.0,
           fmt("E1 = %.6g", e[0]) + fmt(", E2 = %.6g", e[1]));
      const int n0 = sign_changes(sp.spectrum.eigenfields[0]), n1 = sign_changes(sp.spectrum.eigenfields[1]);
      flag(r.checks, name + ": lowest eigenfunction sign changes = 0", n0 == 0, std::to_string(n0));
      flag(r.checks, name + ": second eigenfunction sign changes = 1", n1 == 1, std::to_string(n1));
    }
  }
  return r;
}

// ---------------------------------------------------------------- criterion 5
CriterionResult simplicity(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    std::vector<Check> c;
    const std::string name = point_name(p) + " L_+";
    try {
      const RadialLplus lp = radial_lplus(*spectral_state(p));
      if (lp.E.size() > 1)
        lower(c, name + ": min gap among " + std::to_string(lp.E.size()) + " discrete eigenvalues", lp.min_gap, 1e-6);
      double worst = 1.0;
      for (const auto& psi : lp.psi) worst = std::min(worst, psi0_ratio(psi));
      lower(c, name + ": min |psi(0)|/max|psi|", worst, 0.01);
    } catch (const std::exception& e) {
      flag(c, name, false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  for (int N = 1; N <= 3; ++N) {
    const double g = well_coupling(N, 0.5);
    const auto grid = make_grid(SectorIndex{N, 0}, kWellR, kWellM);
    for (double s : {0.5, 0.75, 1.0}) {
      const std::string name = "well N=" + std::to_string(N) + " s=" + fmt("%g", s);
      const RadialSpectrum sp = radial_spectrum(s, PotentialSpec::gaussian(g), grid, 8);
      std::vector<double> E;
      double worst = 1.0;
      for (std::size_t k = 0; k < sp.spectrum.eigenvalues.size(); ++k)
        if (sp.spectrum.eigenvalues[k] < 0.0) {
          E.push_back(sp.spectrum.eigenvalues[k]);
          worst = std::min(worst, psi0_ratio(sp.spectrum.eigenfields[k]));
        }
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < E.size(); ++k) gap = std::min(gap, E[k] - E[k - 1]);
      lower(r.checks, name + ": min gap among " + std::to_string(E.size()) + " negative eigenvalues", gap, 1e-6);
      lower(r.checks, name + ": min |psi(0)|/max|psi|", worst, 0.01);
    }
  }
  return r;
}

// ---------------------------------------------------------------- criterion 6
void monotone_checks(std::vector<Check>& c, const std::string& name, const RadialField& u, const RadialField& Vf,
                     double s) {
  const MonotoneH h = monotone_H(u, Vf, s);
  upper(c, name + ": max increase of H / max|H|", h.max_increase / h.max_abs, 1e-6);
  upper(c, name + ": |H(0.8R)| / |H(0)|", std::abs(h.H_far) / std::abs(h.H0), 1e-4);
  upper(c, name + ": H(0) - (-V(0)u(0)^2/2)", h.H0 - h.bound0, 1e-6,
        "H(0) = " + fmt("%.6g", h.H0) + ", bound " + fmt("%.6g", h.bound0));
}

CriterionResult monotonicity(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    std::vector<Check> c;
    try {
      const RadialLplus lp = radial_lplus(*spectral_state(p));
      for (std::size_t k = 0; k < std::min<std::size_t>(2, lp.E.size()); ++k) {
        const std::string name = point_name(p) + " L_+ psi" + std::to_string(k + 1);
        const RadialField Vf = RadialField::from_values(
            lp.potential.grid(), lp.potential.values().array() - lp.E[k]);
        flag(c, name + ": folded potential non-decreasing", PotentialSpec::sampled(Vf).monotone_nondecreasing());
        monotone_checks(c, name, lp.psi[k], Vf, p.s);
      }
    } catch (const std::exception& e) {
      flag(c, point_name(p), false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  for (int N = 1; N <= 3; ++N) {
    const double g = well_coupling(N, 0.5);
    const auto grid = make_grid(SectorIndex{N, 0}, kWellR, kWellM);
    const PotentialSpec W = PotentialSpec::gaussian(g);
    for (double s : {0.5, 0.75}) {
      const RadialSpectrum sp = radial_spectrum(s, W, grid, 2);
      for (int k = 0; k < 2; ++k) {
        const std::string name = "well N=" + std::to_string(N) + " s=" + fmt("%g", s) + " psi" + std::to_string(k + 1);
        const PotentialSpec folded = PotentialSpec::shifted(W, sp.spectrum.eigenvalues[k]);
        const RadialField Vf = RadialField::from_values(grid, folded.at_nodes(*grid));
        monotone_checks(r.checks, name, sp.spectrum.eigenfields[k], Vf, s);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- criterion 7
CriterionResult trace(const Options& o) {
  CriterionResult r;
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int M = 128, band = 24;
  auto bump = [](double t) { return t * std::exp(-t); };
  auto dbump = [](double t) { return (1.0 - t) * std::exp(-t); };
  for (int N = 1; N <= 3; ++N) {
    const auto grid = make_grid(SectorIndex{N, 0}, 20.0, M);
    for (double s : {0.25, 0.5, 0.75}) {
      double worst = 0.0, min_bumped = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(M);
        for (int j = 0; j < band; ++j) c[j] = normal(rng) * std::exp(-0.1 * j);
        const RadialField f = RadialField::from_coeffs(grid, c);
        const TraceReport t = trace_inequality_check(f, s);
        worst = std::max(worst, std::abs(t.ratio - 1.0));
        const TraceReport tb = trace_inequality_check(f, s, bump, dbump, 0.3);
        min_bumped = std::min(min_bumped, tb.ratio);
      }
      const std::string name = "N=" + std::to_string(N) + " s=" + fmt("%g", s);
      upper(r.checks, name + ": max |energy ratio - 1| over 5 random data", worst, 1e-4);
      lower(r.checks, name + ": min ratio with non-extension perturbation", min_bumped - 1.0, 1e-12,
            "ratio - 1 must be positive");
    }
  }
  return r;
}

// ---------------------------------------------------------------- criterion 8
CriterionResult dn_constant(const Options&) {
  CriterionResult r;
  for (double s : {0.25, 0.5, 0.75}) {
    const double exact = std::pow(2.0, 2.0 * s - 1.0) * std::tgamma(s) / std::tgamma(1.0 - s);
    double worst = 0.0;
    for (double mu : {0.25, 1.0, 7.0, 100.0}) worst = std::max(worst, std::abs(recovered_dn_constant(s, mu) / exact - 1.0));
    const std::string name = "s=" + fmt("%g", s);
    upper(r.checks, name + ": recovered d_s relative error", worst, 1e-6, "exact " + fmt("%.15g", exact));
    if (s == 0.5) upper(r.checks, name + ": |d_s - 1|", std::abs(recovered_dn_constant(0.5, 1.0) - 1.0), 1e-10);
    // full field: Neumann data of the extension against (-Delta)^s f
    const auto grid = make_grid(SectorIndex{1, 0}, 20.0, 128);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(128);
    for (int j = 0; j < 20; ++j) c[j] = 1.0 / (1.0 + j);
    const DirichletNeumann dn = dirichlet_neumann_check(RadialField::from_coeffs(grid, c), s);
    upper(r.checks, name + ": -d_s t^a u_t vs (-Delta)^s f relative gap", dn.residual, 1e-6);
  }
  return r;
}

// ---------------------------------------------------------------- criterion 9
CriterionResult resolvent(const Options& o) {
  CriterionResult r;
  struct Item {
    int N;
    double s;
  };
  std::vector<Item> items;
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.5, 0.75}) items.push_back({N, s});
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(items.size()), o.jobs, [&](int i) {
    const auto [N, s] = items[i];
    std::vector<Check> c;
    const std::string base = "N=" + std::to_string(N) + " s=" + fmt("%g", s);
    try {
      std::vector<double> scaled;
      for (double lam : {0.5, 1.0, 2.0}) {
        const std::string name = base + " lambda=" + fmt("%g", lam);
        const KernelProfile kp = resolvent_kernel(s, lam, N, log_radii(1e-3, 1e5, 12));
        upper(c, name + ": |lambda int G - 1|", std::abs(lam * kp.l1_norm - 1.0), 1e-4);
        bool pos = true, dec = true;
        for (std::size_t k = 0; k < kp.values.size(); ++k) {
          pos = pos && kp.values[k] > 0.0;
          if (k > 0) dec = dec && kp.values[k] < kp.values[k - 1];
        }
        flag(c, name + ": positive at all samples", pos, std::to_string(kp.values.size()) + " radii");
        flag(c, name + ": strictly decreasing", dec);
        scaled.push_back(kp.tail_constant * lam * lam);
      }
      const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
      upper(c, base + ": spread of lambda^2 C_tail", *hi / *lo - 1.0, 0.02);
    } catch (const std::exception& e) {
      flag(c, base, false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  return r;
}

// ---------------------------------------------------------------- criterion 10
CriterionResult continuation(const Options&) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const auto grid = make_grid(SectorIndex{1, 0}, 400.0, 2048);
  Branch b = continue_branch(1, 1.0, 1.0, 0.5, 0.01, grid);
  const double gap = mass_derivative_check(b);
  const double dt = seconds_since(t0);
  flag(r.checks, "branch reached s = 0.5", std::abs(b.points.back().s - 0.5) < 1e-12,
       std::to_string(b.points.size()) + " points");
  int bad = 0;
  double tres = 0.0;
  for (const auto& p : b.points) {
    bad += p.morse_index != 1;
    tres = std::max(tres, p.tangent_residual);
  }
  flag(r.checks, "Morse index 1 at every point", bad == 0, std::to_string(bad) + " exceptions");
  upper(r.checks, "max tangent-equation residual", tres, 1e-7);
  upper(r.checks, "max mass-identity gap (centered differences)", gap, 1e-3, "relative to max |dM/ds|");
  const auto& Q = b.points.back().gs.Q;
  double err = 0.0;
  for (int q = 0; q < grid->size(); ++q) {
    const double x = grid->nodes()[q];
    err = std::max(err, std::abs(Q.values()[q] - 2.0 / (1.0 + x * x)));
  }
  upper(r.checks, "endpoint vs 2/(1+r^2), max error / 2", err / 2.0, 2e-3);
  const auto& p1 = b.points.front();
  const double band = std::max({b.M_max / p1.M, p1.M / b.M_min, b.T_max / p1.T, p1.T / b.T_min, b.V_max / p1.V,
                                p1.V / b.V_min});
  upper(r.checks, "norm band max(M,T,V)/value at s=1", band, 10.0);
  upper(r.checks, "runtime [s]", dt, 900.0);
  CsvTable tab{"branch", {"s", "M", "T", "V", "dMds_analytic", "dMds_numeric", "morse_index"}, {}};
  for (const auto& p : b.points)
    tab.rows.push_back({p.s, p.M, p.T, p.V, p.dMds_analytic, p.dMds_numeric, double(p.morse_index)});
  r.tables.push_back(std::move(tab));
  return r;
}

// ---------------------------------------------------------------- criterion 11
CriterionResult uniqueness(const Options& o) {
  CriterionResult r;
  const auto pts = lattice();
  auto res = parallel_map<std::vector<Check>>(static_cast<int>(pts.size()), o.jobs, [&](int i) {
    const auto& p = pts[i];
    std::vector<Check> c;
    const std::string name = point_name(p);
    try {
      const auto grid = make_grid(SectorIndex{p.N, 0}, p.R_spectral, p.M_spectral);
      const Branch b = continue_branch(p.N, p.alpha, 1.0, p.s, 0.05, grid);
      const UniquenessResult u = uniqueness_probe(ProblemParams{p.N, p.s, p.alpha}, grid, 3, {b.points.back().gs.Q});
      flag(c, name + ": all candidates accepted", u.accepted == 4 && u.rejected.empty(),
           std::to_string(u.accepted) + " of 4" + (u.rejected.empty() ? "" : ": " + u.rejected.front()));
      upper(c, name + ": max pairwise max-norm distance", u.max_distance, 1e-6,
            "3 starts + branch endpoint from s=1 (" + std::to_string(b.points.size()) + " points)");
    } catch (const std::exception& e) {
      flag(c, name, false, e.what());
    }
    return c;
  });
  for (auto& x : res) r.checks.insert(r.checks.end(), x.begin(), x.end());
  return r;
}

// ---------------------------------------------------------------- criterion 12
CriterionResult homotopy(const Options& o) {
  CriterionResult r;
  const double s0 = 0.5;
  auto res = parallel_map<std::pair<std::vector<Check>, CsvTable>>(3, o.jobs, [&](int i) {
    const int N = i + 1;
    std::vector<Check> c;
    CsvTable tab{"homotopy_N" + std::to_string(N), {"kappa", "leg", "s_kappa", "E1", "E2", "sign_changes"}, {}};
    const std::string name = "N=" + std::to_string(N) + " s0=" + fmt("%g", s0);
    try {
      const auto grid = make_grid(SectorIndex{N, 0}, kWellR, 384);
      const PotentialSpec W = PotentialSpec::gaussian(well_coupling(N, s0));
      // a wider, shallower well that still binds two states at s0
      const PotentialSpec V = PotentialSpec::gaussian(1.25 * trial_coupling_bound(s0, N) / std::pow(4.0, s0), 2.0);
      const double b1 = (homotopy_operator(grid, s0, V, W, 1, 1.0).matrix() -
                         homotopy_operator(grid, s0, V, W, 2, 0.0).matrix()).cwiseAbs().maxCoeff();
      const double b2 = (homotopy_operator(grid, s0, V, W, 2, 1.0).matrix() -
                         homotopy_operator(grid, s0, V, W, 3, 0.0).matrix()).cwiseAbs().maxCoeff();
      upper(c, name + ": leg junction operator mismatch", std::max(b1, b2), 1e-10);
      std::vector<double> jumps;
      for (int steps : {16, 32, 64}) {
        const auto run = homotopy_run(s0, V, W, grid, HomotopyOptions{steps});
        jumps.push_back(max_eigenvalue_jump(run));
        int bad_e = 0, bad_sc = 0;
        double min_gap = std::numeric_limits<double>::infinity(), max_e2 = -std::numeric_limits<double>::infinity();
        for (const auto& st : run) {
          bad_e += !(st.E1 < st.E2 && st.E2 < 0.0);
          bad_sc += st.sign_changes != 1;
          min_gap = std::min(min_gap, st.E2 - st.E1);
          max_e2 = std::max(max_e2, st.E2);
          if (steps == 32)
            tab.rows.push_back({st.kappa, double(st.leg), st.s_kappa, st.E1, st.E2, double(st.sign_changes)});
        }
        const std::string rn = name + " " + std::to_string(steps) + " knots/leg";
        flag(c, rn + ": E1 < E2 < 0 at every knot", bad_e == 0, "max E2 = " + fmt("%.6g", max_e2));
        lower(c, rn + ": min E2 - E1", min_gap, 1e-6);
        flag(c, rn + ": psi2 has one sign change at every knot", bad_sc == 0,
             std::to_string(bad_sc) + " of " + std::to_string(run.size()) + " knots differ");
      }
      lower(c, name + ": jump order 16->32", std::log2(jumps[0] / jumps[1]), 0.95);
      lower(c, name + ": jump order 32->64", std::log2(jumps[1] / jumps[2]), 0.95);
    } catch (const std::exception& e) {
      flag(c, name, false, e.what());
    }
    return std::make_pair(c, tab);
  });
  for (auto& [c, t] : res) {
    r.checks.insert(r.checks.end(), c.begin(), c.end());
    r.tables.push_back(std::move(t));
  }
  return r;
}

using Runner = CriterionResult (*)(const Options&);

struct Entry {
  const char* title;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> e = {
      {"Benjamin-Ono soliton", bo_soliton},
      {"Pohozaev identities on the lattice", pohozaev},
      {"nondegeneracy of L_+", nondegeneracy},
      {"oscillation: one sign change of the second eigenfunction", oscillation},
      {"simplicity and nonvanishing at the origin", simplicity},
      {"monotonicity formula H(r)", monotonicity},
      {"trace identity and minimality of the extension", trace},
      {"Dirichlet-Neumann constant", dn_constant},
      {"resolvent kernel", resolvent},
      {"continuation of the N=1, alpha=1 branch", continuation},
      {"uniqueness probe", uniqueness},
      {"three-leg homotopy", homotopy},
  };
  return e;
}

}  // namespace

std::vector<LatticePoint> lattice() {
  // {N, s, alpha, R_identity, M_identity, R_spectral, M_spectral}
  return {
      {1, 0.5, 1.0, 800, 4096, 60, 1024},   {1, 0.5, 2.0, 600, 10240, 60, 1024},
      {1, 0.7, 1.0, 400, 2048, 60, 1024},   {1, 0.7, 2.0, 300, 1536, 60, 1024},
      {1, 0.9, 1.0, 200, 1024, 60, 1024},   {1, 0.9, 2.0, 200, 1024, 60, 1024},
      {2, 0.5, 1.0, 150, 2304, 60, 1024},   {2, 0.5, 1.8, 25, 10240, 6, 2048},
      {2, 0.7, 1.0, 100, 768, 60, 1024},    {2, 0.7, 2.0, 50, 1024, 60, 1024},
      {2, 0.9, 1.0, 100, 768, 60, 1024},    {2, 0.9, 2.0, 100, 768, 60, 1024},
      {3, 0.5, 0.9, 16, 2048, 8, 1024},     {3, 0.7, 1.0, 100, 768, 60, 1024},
      {3, 0.7, 1.575, 30, 2048, 12, 1024},  {3, 0.9, 1.0, 100, 768, 60, 1024},
      {3, 0.9, 2.0, 50, 768, 60, 1024},
  };
}

int criterion_count() { return static_cast<int>(registry().size()); }

std::string criterion_title(int id) {
  if (id < 1 || id > criterion_count()) throw std::out_of_range("no criterion " + std::to_string(id));
  return registry()[id - 1].title;
}

CriterionResult run_criterion(int id, const Options& opts) {
  const std::string title = criterion_title(id);
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = registry()[id - 1].run(opts);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.id = id;
  r.title = title;
  r.seconds = seconds_since(t0);
  r.pass = r.error.empty() && !r.checks.empty() &&
           std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.title << "  ("
     << fmt("%.1f s", r.seconds) << ")\n";
  if (!r.error.empty()) os << "    error: " << r.error << "\n";
  for (const auto& c : r.checks) {
    os << "    [" << (c.pass ? "ok" : "FAIL") << "] " << c.name;
    if (!(c.value == 1.0 && c.tolerance == 1.0)) os << " = " << fmt("%.6g", c.value) << " (limit " << fmt("%.3g", c.tolerance) << ")";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  return os.str();
}

nlohmann::json to_json(const CriterionResult& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["pass"] = r.pass;
  if (!r.error.empty()) j["error"] = r.error;
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    // runtimes vary between runs and stay out of the deterministic summary
    if (c.name.find("[s]") != std::string::npos) {
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"limit", c.tolerance}});
      continue;
    }
    arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.tolerance}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return j;
}

}  // namespace fraclap::acceptance
