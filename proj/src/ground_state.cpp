#include "fraclap/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/linearized.hpp"

namespace fraclap {

double ProblemParams::critical_exponent(double s, int N) {
  if (s < 0.5 * N) return 4.0 * s / (N - 2.0 * s);
  return std::numeric_limits<double>::infinity();
}

bool ProblemParams::admissible() const {
  return N >= 1 && s > 0.0 && s <= 1.0 && alpha > 0.0 && alpha < critical_exponent(s, N);
}

void ProblemParams::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double astar = critical_exponent(s, N);
  if (!(alpha < astar)) {
    std::ostringstream os;
    os << "inadmissible alpha = " << alpha << ": requires alpha < alpha_*(s=" << s << ", N=" << N
       << ") = " << astar;
    throw std::invalid_argument(os.str());
  }
}

double weinstein_J(const RadialField& u, const ProblemParams& p) {
  const Norms n = norms(u, p.s, p.alpha);
  if (!(n.V > 0.0)) throw std::invalid_argument("weinstein_J: u must be nonzero");
  const double a = p.alpha, s = p.s, N = p.N;
  return std::pow(n.T, N * a / (4.0 * s)) * std::pow(n.M, a / (4.0 * s) * (2.0 * s - N) + 1.0) / n.V;
}

namespace {

Eigen::VectorXd nonlinearity(const Eigen::VectorXd& q, double alpha) {
  return (q.array().abs().pow(alpha) * q.array()).matrix();
}

double weighted_norm(const RadialGrid& g, const Eigen::VectorXd& v) {
  return std::sqrt((g.weights().array() * v.array().square()).sum());
}

Eigen::VectorXd equation_map(const RadialField& Q, double s, double alpha) {
  const auto& g = *Q.grid();
  Eigen::VectorXd c = Q.coeffs();
  c.array() *= g.eigenvalues().array().pow(s) + 1.0;
  return g.inverse(c) - nonlinearity(Q.values(), alpha);
}

}  // namespace

double equation_residual(const RadialField& Q, const ProblemParams& p) {
  const auto& g = *Q.grid();
  return weighted_norm(g, equation_map(Q, p.s, p.alpha)) / weighted_norm(g, Q.values());
}

RadialField gaussian_profile(GridPtr grid, double height, double width) {
  return RadialField::from_function(std::move(grid), [=](double r) {
    const double x = r / width;
    return height * std::exp(-0.5 * x * x);
  });
}

RadialField lorentzian_profile(GridPtr grid, double height, double width) {
  return RadialField::from_function(std::move(grid), [=](double r) {
    const double x = r / width;
    return height / (1.0 + x * x);
  });
}

namespace {

// Newton iterations in place; returns the number of steps taken
int newton_iterate(const ProblemParams& p, RadialField& Q, const SolveOptions& opts, double& res) {
  const auto& g = Q.grid();
  res = equation_residual(Q, p);
  int it = 0;
  const double floor = std::min(opts.tol * 1e-3, 1e-12);
  for (; it < opts.max_newton && res > floor; ++it) {
    const SectorOperator J = lplus_radial(Q, p.s, p.alpha);
    const Eigen::VectorXd F = equation_map(Q, p.s, p.alpha);
    const Eigen::VectorXd dq = J.solve(F);
    RadialField next = RadialField::from_values(g, Q.values() - dq);
    const double nres = equation_residual(next, p);
    if (!std::isfinite(nres)) throw SolverError(ErrorKind::newton_singular, "non-finite Newton iterate");
    if (nres > 0.5 * res && res < opts.tol) break;  // at the rounding floor
    Q = std::move(next);
    res = nres;
  }
  return it;
}

}  // namespace

void finalize(GroundState& gs) {
  const auto& p = gs.params;
  const Norms n = norms(gs.Q, p.s, p.alpha);
  gs.M = n.M;
  gs.T = n.T;
  gs.V = n.V;
  auto [r1, r2] = pohozaev_check(gs);
  gs.pohozaev1_residual = r1;
  gs.pohozaev2_residual = r2;
  gs.weinstein_J = weinstein_J(gs.Q, p);
  gs.residual = equation_residual(gs.Q, p);
  try {
    const TailFit tf = tail_fit(gs);
    gs.tail_constant = tf.C_fit;
    gs.tail_residual = tf.residual;
  } catch (const SolverError&) {
    gs.tail_constant = std::numeric_limits<double>::quiet_NaN();
    gs.tail_residual = std::numeric_limits<double>::quiet_NaN();
  }
}

GroundState solve_ground_state(const ProblemParams& params, GridPtr grid, const std::optional<RadialField>& init,
                               const SolveOptions& opts) {
  params.validate();
  if (grid->sector().ell != 0 || grid->sector().N != params.N)
    throw std::invalid_argument("solve_ground_state: grid must be the radial sector of dimension N");
  RadialField Q = init ? *init : gaussian_profile(grid, 1.0, grid->radius() / 20.0);
  if (Q.grid() != grid) throw std::invalid_argument("solve_ground_state: init lives on another grid");

  const double s = params.s, a = params.alpha;
  const Eigen::VectorXd L0 = grid->eigenvalues().array().pow(s) + 1.0;
  const double expo = (a + 1.0) / a;
  GroundState gs;
  gs.params = params;
  int it = 0;
  double gamma = 0.0;
  for (; it < opts.max_petviashvili; ++it) {
    const Eigen::VectorXd& c = Q.coeffs();
    const Eigen::VectorXd nl = grid->forward(nonlinearity(Q.values(), a));
    const double num = (c.array() * L0.array() * c.array()).sum();
    const double den = c.dot(nl);
    if (!(den > 0.0) || !std::isfinite(num))
      throw SolverError(ErrorKind::stalled, "Petviashvili quotient lost positivity at iteration " + std::to_string(it));
    gamma = num / den;
    Eigen::VectorXd next = nl.cwiseQuotient(L0) * std::pow(gamma, expo);
    Q = RadialField::from_coeffs(grid, std::move(next));
    if (std::abs(gamma - 1.0) < opts.switch_tol) {
      ++it;
      break;
    }
  }
  if (!(std::abs(gamma - 1.0) < opts.switch_tol))
    throw SolverError(ErrorKind::stalled,
                      "Petviashvili factor at " + std::to_string(gamma) + " after " + std::to_string(it) + " iterations");
  gs.petviashvili_iterations = it;
  double res = 0.0;
  gs.newton_iterations = newton_iterate(params, Q, opts, res);
  gs.iterations = gs.petviashvili_iterations + gs.newton_iterations;
  gs.Q = std::move(Q);
  gs.converged = res < opts.tol;
  finalize(gs);
  return gs;
}

GroundState newton_solve(const ProblemParams& params, const RadialField& init, const SolveOptions& opts) {
  params.validate();
  GroundState gs;
  gs.params = params;
  RadialField Q = init;
  double res = 0.0;
  gs.newton_iterations = newton_iterate(params, Q, opts, res);
  gs.iterations = gs.newton_iterations;
  gs.Q = std::move(Q);
  gs.converged = res < opts.tol;
  finalize(gs);
  return gs;
}

std::pair<double, double> pohozaev_check(const GroundState& gs) {
  const double N = gs.params.N, s = gs.params.s, a = gs.params.alpha;
  const double r1 = std::abs(gs.T + gs.M - gs.V) / gs.V;
  const double r2 = std::abs(0.5 * (N - 2.0 * s) * gs.T + 0.5 * N * gs.M - N / (a + 2.0) * gs.V) / gs.V;
  return {r1, r2};
}

TailFit tail_fit(const GroundState& gs) {
  const auto& g = *gs.Q.grid();
  const double R = g.radius();
  const double ex = gs.params.N + 2.0 * gs.params.s;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  int n = 0;
  for (int q = 0; q < g.size(); ++q) {
    const double r = g.nodes()[q];
    if (r < 0.1 * R || r > 0.25 * R) continue;
    const double v = std::pow(r, ex) * gs.Q.values()[q];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
    ++n;
  }
  if (n < 2) throw SolverError(ErrorKind::no_plateau, "too few nodes in the fit window");
  TailFit tf;
  tf.C_fit = sum / n;
  tf.residual = (hi - lo) / std::abs(tf.C_fit);
  if (!(tf.residual <= 0.1))
    throw SolverError(ErrorKind::no_plateau, "relative variation " + std::to_string(tf.residual) + " over [0.1R, 0.25R]");
  return tf;
}

}  // namespace fraclap
