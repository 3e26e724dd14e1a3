#include "fraclap/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fraclap/errors.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

PotentialSpec PotentialSpec::gaussian(double g, double width) {
  if (!(g >= 0.0) || !(width > 0.0) || !std::isfinite(g))
    throw std::invalid_argument("gaussian potential needs g >= 0 and width > 0");
  PotentialSpec p;
  p.kind_ = Kind::gaussian;
  p.g_ = g;
  p.width_ = width;
  p.monotone_ = true;
  return p;
}

PotentialSpec PotentialSpec::sampled(RadialField samples) {
  if (samples.empty()) throw std::invalid_argument("sampled potential needs a field");
  const auto& v = samples.values();
  if (!v.allFinite()) throw std::invalid_argument("sampled potential must be finite");
  PotentialSpec p;
  p.kind_ = Kind::sampled;
  const double slack = 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
  p.monotone_ = true;
  for (int q = 1; q < v.size(); ++q)
    if (v[q] < v[q - 1] - slack) p.monotone_ = false;
  p.samples_ = std::move(samples);
  return p;
}

PotentialSpec PotentialSpec::shifted(const PotentialSpec& base, double E) {
  PotentialSpec p;
  p.kind_ = Kind::shifted;
  p.shift_ = E;
  p.monotone_ = base.monotone_;
  p.base_ = std::make_shared<const PotentialSpec>(base);
  return p;
}

double PotentialSpec::operator()(double r) const {
  switch (kind_) {
    case Kind::gaussian: return -g_ * std::exp(-(r / width_) * (r / width_));
    case Kind::sampled: return samples_.at(r);
    case Kind::shifted: return (*base_)(r)-shift_;
  }
  return 0.0;
}

Eigen::VectorXd PotentialSpec::at_nodes(const RadialGrid& grid) const {
  if (kind_ == Kind::sampled && samples_.grid()->size() == grid.size() &&
      samples_.grid()->sector() == grid.sector() && samples_.grid()->radius() == grid.radius())
    return samples_.values();
  if (kind_ == Kind::shifted) return base_->at_nodes(grid).array() - shift_;
  Eigen::VectorXd v(grid.size());
  for (int q = 0; q < grid.size(); ++q) v[q] = (*this)(grid.nodes()[q]);
  return v;
}

SectorOperator schrodinger_operator(GridPtr grid, double s, const PotentialSpec& V) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0,1]");
  Eigen::VectorXd sym = grid->eigenvalues().array().pow(s);
  Eigen::VectorXd pot = V.at_nodes(*grid);
  return SectorOperator(std::move(grid), std::move(sym), std::move(pot));
}

RadialSpectrum radial_spectrum(double s, const PotentialSpec& V, GridPtr grid, int k) {
  if (grid->sector().ell != 0) throw std::invalid_argument("radial_spectrum expects the l = 0 sector");
  const SectorOperator op = schrodinger_operator(std::move(grid), s, V);
  RadialSpectrum out;
  out.spectrum = sector_spectrum(op, k, 0.0);
  const auto& e = out.spectrum.eigenvalues;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < e.size(); ++i) out.min_gap = std::min(out.min_gap, e[i] - e[i - 1]);
  return out;
}

namespace {

// int_{R^N} r^{2p} e^{-c r^2} dx
double gauss_moment(int N, double p, double c) {
  return special::sphere_area(N) * std::tgamma(p + 0.5 * N) / (2.0 * std::pow(c, p + 0.5 * N));
}

double norm1(int N) { return std::pow(std::numbers::pi, -0.25 * N); }
double norm2(int N) { return 1.0 / std::sqrt(0.5 * N * std::pow(std::numbers::pi, 0.5 * N)); }

}  // namespace

double trial_psi1(int N, double r) { return norm1(N) * std::exp(-0.5 * r * r); }
double trial_psi2(int N, double r) { return norm2(N) * (r * r - 0.5 * N) * std::exp(-0.5 * r * r); }

TrialMatrices trial_matrices(double s, int N) {
  if (!(s > 0.0 && s <= 1.0) || N < 1) throw std::invalid_argument("trial_matrices: need s in (0,1], N >= 1");
  const double h = 0.5 * N;
  const double c1 = norm1(N), c2 = norm2(N);
  // psi_1 and psi_2 are Fourier eigenfunctions with eigenvalues +1 and -1, so the
  // kinetic entries are Gaussian moments of |xi|^{2s} with a sign on the off-diagonal
  auto m = [&](double p) { return gauss_moment(N, p, 1.0); };
  auto n = [&](double p) { return gauss_moment(N, p, 2.0); };
  TrialMatrices tm;
  tm.T(0, 0) = c1 * c1 * m(s);
  tm.T(0, 1) = tm.T(1, 0) = -c1 * c2 * (m(s + 1) - h * m(s));
  tm.T(1, 1) = c2 * c2 * (m(s + 2) - 2 * h * m(s + 1) + h * h * m(s));
  tm.V(0, 0) = c1 * c1 * n(0);
  tm.V(0, 1) = tm.V(1, 0) = c1 * c2 * (n(1) - h * n(0));
  tm.V(1, 1) = c2 * c2 * (n(2) - 2 * h * n(1) + h * h * n(0));
  return tm;
}

Eigen::Matrix2d trial_overlap(const RadialGrid& grid) {
  const int N = grid.sector().N;
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int q = 0; q < grid.size(); ++q) {
    const double r = grid.nodes()[q], w = grid.weights()[q];
    const double a = trial_psi1(N, r), b = trial_psi2(N, r);
    G(0, 0) += w * a * a;
    G(0, 1) += w * a * b;
    G(1, 1) += w * b * b;
  }
  G(1, 0) = G(0, 1);
  return G;
}

double trial_coupling_bound(double s, int N) {
  const TrialMatrices tm = trial_matrices(s, N);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(tm.T, tm.V, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CouplingResult find_two_state_coupling(double s, int N, const CouplingOptions& opts) {
  if (!(s > 0.0 && s <= 1.0) || N < 1) throw std::invalid_argument("find_two_state_coupling: need s in (0,1], N >= 1");
  const GridPtr grid = make_grid(SectorIndex{N, 0}, opts.R, opts.M);
  auto second = [&](double g) { return radial_spectrum(s, PotentialSpec::gaussian(g), grid, 2).spectrum.eigenvalues[1]; };
  double lo = 0.0, hi = 1.0, e_hi = second(hi);
  while (!(e_hi < opts.threshold)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.g_max)
      throw SolverError(ErrorKind::bracket_failure,
                        "second radial eigenvalue stays above threshold up to g = " + std::to_string(opts.g_max));
    e_hi = second(hi);
  }
  CouplingResult out;
  while (hi - lo > opts.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const double e = second(mid);
    if (e < opts.threshold) {
      hi = mid;
      e_hi = e;
    } else {
      lo = mid;
    }
    ++out.bisection_steps;
  }
  out.g_star = hi;
  out.E2 = e_hi;
  out.matrix_bound = trial_coupling_bound(s, N);
  return out;
}

std::pair<int, double> homotopy_leg(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0,1]");
  if (kappa <= 1.0 / 3.0) return {1, std::min(1.0, 3.0 * kappa)};
  if (kappa <= 2.0 / 3.0) return {2, std::clamp(3.0 * kappa - 1.0, 0.0, 1.0)};
  return {3, std::clamp(3.0 * kappa - 2.0, 0.0, 1.0)};
}

SectorOperator homotopy_operator(GridPtr grid, double s0, const PotentialSpec& V, const PotentialSpec& W,
                                 int leg, double tau) {
  if (!(s0 > 0.0 && s0 <= 1.0)) throw std::invalid_argument("s0 must lie in (0,1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0,1]");
  const Eigen::VectorXd v = V.at_nodes(*grid), w = W.at_nodes(*grid);
  double s = s0;
  Eigen::VectorXd pot;
  switch (leg) {
    case 1: pot = v + tau * w; break;
    case 2: pot = (1.0 - tau) * v + w; break;
    case 3:
      pot = w;
      s = (1.0 - tau) * s0 + tau;
      break;
    default: throw std::invalid_argument("leg must be 1, 2 or 3");
  }
  Eigen::VectorXd sym = grid->eigenvalues().array().pow(s);
  return SectorOperator(std::move(grid), std::move(sym), std::move(pot));
}

namespace {

HomotopyState homotopy_state(const GridPtr& grid, double s0, const PotentialSpec& V, const PotentialSpec& W, int leg,
                             double tau) {
  const SectorOperator op = homotopy_operator(grid, s0, V, W, leg, tau);
  const SectorSpectrum sp = sector_spectrum(op, 2, 0.0);
  HomotopyState st;
  st.leg = leg;
  st.tau = tau;
  st.kappa = (leg - 1 + tau) / 3.0;
  st.s_kappa = leg == 3 ? (1.0 - tau) * s0 + tau : s0;
  st.V_kappa = op.potential();
  st.E1 = sp.eigenvalues[0];
  st.E2 = sp.eigenvalues[1];
  st.psi2 = sp.eigenfields[1];
  return st;
}

// aligns next's sign with prev and returns the overlap magnitude
double align(const HomotopyState& prev, HomotopyState& next) {
  const double ov = inner(prev.psi2, next.psi2);
  if (ov < 0) next.psi2 = next.psi2 * -1.0;
  return std::abs(ov);
}

}  // namespace

std::vector<HomotopyState> homotopy_run(double s0, const PotentialSpec& V, const PotentialSpec& W, GridPtr grid,
                                        const HomotopyOptions& opts) {
  if (opts.steps_per_leg < 1) throw std::invalid_argument("steps_per_leg must be positive");
  if (grid->sector().ell != 0) throw std::invalid_argument("homotopy_run expects the l = 0 sector");
  const int n = opts.steps_per_leg;
  std::vector<HomotopyState> run;
  run.reserve(3 * n + 1);
  HomotopyState st = homotopy_state(grid, s0, V, W, 1, 0.0);
  st.sign_changes = sign_changes(st.psi2);
  run.push_back(st);
  for (int i = 1; i <= 3 * n; ++i) {
    const int leg = (i - 1) / n + 1;
    const double tau_prev = (i - 1 - (leg - 1) * n) / static_cast<double>(n);
    const double tau = (i - (leg - 1) * n) / static_cast<double>(n);
    HomotopyState next = homotopy_state(grid, s0, V, W, leg, tau);
    double ov = align(run.back(), next);
    int level = 0;
    while (ov < opts.min_overlap) {
      if (++level > opts.max_refinements)
        throw SolverError(ErrorKind::continuity_break,
                          "psi2 overlap " + std::to_string(ov) + " at kappa = " + std::to_string(next.kappa));
      // walk the interval in 2^level substeps and carry the sign through
      const int sub = 1 << level;
      HomotopyState cur = run.back();
      double worst = 1.0;
      for (int j = 1; j <= sub; ++j) {
        HomotopyState mid = homotopy_state(grid, s0, V, W, leg, tau_prev + (tau - tau_prev) * j / sub);
        worst = std::min(worst, align(cur, mid));
        cur = std::move(mid);
      }
      next = std::move(cur);
      ov = worst;
    }
    next.overlap = ov;
    next.refinements = level;
    next.sign_changes = sign_changes(next.psi2);
    run.push_back(std::move(next));
  }
  return run;
}

double max_eigenvalue_jump(const std::vector<HomotopyState>& run) {
  double m = 0.0;
  for (std::size_t i = 1; i < run.size(); ++i) m = std::max(m, std::abs(run[i].E2 - run[i - 1].E2));
  return m;
}

EigenTail eigen_tail_fit(const RadialField& psi, double s, double E, const PotentialSpec& V) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0,1]");
  if (!(E < 0.0)) throw std::invalid_argument("eigen_tail_fit needs E < 0");
  const auto& g = *psi.grid();
  const int N = g.sector().N;
  const double R = g.radius();
  EigenTail out;
  const Eigen::VectorXd v = V.at_nodes(g);
  out.integral_Vpsi = (g.weights().array() * v.array() * psi.values().array()).sum();

  const bool algebraic = s < 1.0;
  const double lo = algebraic ? 0.1 * R : 0.4 * R, hi = algebraic ? 0.25 * R : 0.7 * R;
  std::vector<double> xs, ys;
  int sign = 0;
  for (int q = 0; q < g.size(); ++q) {
    const double r = g.nodes()[q];
    if (r < lo || r > hi) continue;
    const double p = psi.values()[q];
    if (algebraic) {
      xs.push_back(std::pow(r, -2.0 * s));
      ys.push_back(std::pow(r, N + 2.0 * s) * p);
    } else {
      const int sg = p > 0 ? 1 : (p < 0 ? -1 : 0);
      if (sg == 0 || (sign != 0 && sg != sign))
        throw SolverError(ErrorKind::bad_exponential_fit, "eigenfunction changes sign inside [0.4R, 0.7R]");
      sign = sg;
      xs.push_back(r);
      ys.push_back(std::log(std::abs(p) * std::pow(r, 0.5 * (N - 1))));
    }
  }
  if (xs.size() < 3) throw SolverError(algebraic ? ErrorKind::no_plateau : ErrorKind::bad_exponential_fit,
                                       "too few nodes in the fit window");
  const int cols = algebraic ? 3 : 2;
  Eigen::MatrixXd A(xs.size(), cols);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    if (algebraic) A(i, 2) = xs[i] * xs[i];
    b[i] = ys[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  const double misfit = std::sqrt((A * c - b).squaredNorm() / b.size());
  if (algebraic) {
    out.coefficient = c[0];
    out.exponent_residual = misfit / std::abs(c[0]);
    if (!(out.exponent_residual <= 0.05))
      throw SolverError(ErrorKind::no_plateau,
                        "tail misfit " + std::to_string(out.exponent_residual) + " over [0.1R, 0.25R]");
  } else {
    if (!(misfit <= 0.05))
      throw SolverError(ErrorKind::bad_exponential_fit,
                        "log-linear misfit " + std::to_string(misfit) + " over [0.4R, 0.7R]");
    out.slope = c[1];
    out.coefficient = sign * std::exp(c[0]);
    const double k = std::sqrt(-E);
    out.exponent_residual = std::abs(out.slope + k) / k;
  }
  out.sign_opposite = out.coefficient * out.integral_Vpsi < 0.0;
  return out;
}

KatoForms kato_forms(const RadialField& f, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0,1]");
  const RadialField a = RadialField::from_values(f.grid(), f.values().cwiseAbs());
  auto m = [s](double mu) { return std::pow(mu, s); };
  return {quadratic_form(a, a, m), quadratic_form(f, f, m)};
}

}  // namespace fraclap
