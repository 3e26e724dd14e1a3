#include "fraclap/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraclap/errors.hpp"
#include "fraclap/linearized.hpp"

namespace fraclap {

TangentResult tangent(const GroundState& gs) {
  const auto& p = gs.params;
  const SectorOperator L = lplus_radial(gs.Q, p.s, p.alpha);
  TangentResult out;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError(ErrorKind::eigensolver_failure, "L_+ eigenvalues failed");
    const auto& ev = es.eigenvalues();
    const double zt = zero_tolerance(*gs.Q.grid(), p.s);
    out.min_abs_eig = ev.cwiseAbs().minCoeff();
    out.morse_index = static_cast<int>((ev.array() < -zt).count());
    if (out.min_abs_eig < zt)
      throw SolverError(ErrorKind::degenerate_lplus, "radial L_+ has eigenvalue " + std::to_string(out.min_abs_eig) +
                                                         " within " + std::to_string(zt) + " of zero at s = " +
                                                         std::to_string(p.s));
  }
  const Eigen::VectorXd rhs = -log_laplacian_s(gs.Q, p.s).values();
  Eigen::VectorXd x;
  try {
    x = L.solve(rhs);
  } catch (const SolverError& e) {
    throw SolverError(ErrorKind::degenerate_lplus, e.what());
  }
  out.dQds = RadialField::from_values(gs.Q.grid(), x);
  const RadialField r = RadialField::from_values(gs.Q.grid(), L.apply(x) - rhs);
  out.residual = l2_norm(r) / l2_norm(RadialField::from_values(gs.Q.grid(), rhs));
  return out;
}

double scaling_identity_residual(const GroundState& gs) {
  const auto& p = gs.params;
  const auto& g = gs.Q.grid();
  const SectorOperator L = lplus_radial(gs.Q, p.s, p.alpha);
  const Eigen::VectorXd rq = g->nodes().cwiseProduct(gs.Q.derivative_at_nodes());
  const Eigen::VectorXd Rv = (2.0 * p.s / p.alpha) * gs.Q.values() + rq;
  const Eigen::VectorXd target = -2.0 * p.s * gs.Q.values();
  return l2_norm(RadialField::from_values(g, L.apply(Rv) - target)) / l2_norm(RadialField::from_values(g, target));
}

double mass_derivative_identity(const GroundState& gs) {
  const auto& p = gs.params;
  const double s = p.s;
  const double qlog = inner(gs.Q, log_laplacian_s(gs.Q, s));
  const double qkin = inner(gs.Q, fractional_laplacian(gs.Q, s));
  return ((4.0 * s / p.alpha + 2.0 * s - p.N) * qlog + 2.0 * qkin) / (2.0 * s);
}

bool is_positive_profile(const RadialField& Q, double tol) {
  const auto& v = Q.values();
  const double mx = v.maxCoeff();
  return mx > 0.0 && v.minCoeff() > -tol * mx;
}

namespace {

BranchPoint make_point(GroundState gs) {
  BranchPoint bp;
  bp.s = gs.params.s;
  const TangentResult t = tangent(gs);
  bp.dQds = t.dQds;
  bp.tangent_residual = t.residual;
  bp.min_abs_eig = t.min_abs_eig;
  bp.morse_index = t.morse_index;
  bp.M = gs.M;
  bp.T = gs.T;
  bp.V = gs.V;
  bp.corrector_iterations = gs.newton_iterations;
  bp.dMds_analytic = mass_derivative_identity(gs);
  const auto& r = gs.Q.grid()->nodes();
  for (int q = 0; q < r.size(); ++q)
    bp.tail_bound = std::max(bp.tail_bound, gs.Q.values()[q] * std::pow(r[q], gs.params.N));
  bp.gs = std::move(gs);
  return bp;
}

void fill_bands(Branch& b) {
  auto mm = [&](auto get, double& lo, double& hi) {
    lo = hi = get(b.points.front());
    for (const auto& p : b.points) {
      lo = std::min(lo, get(p));
      hi = std::max(hi, get(p));
    }
  };
  mm([](const BranchPoint& p) { return p.M; }, b.M_min, b.M_max);
  mm([](const BranchPoint& p) { return p.T; }, b.T_min, b.T_max);
  mm([](const BranchPoint& p) { return p.V; }, b.V_min, b.V_max);
}

}  // namespace

Branch continue_branch(int N, double alpha, double s_start, double s_end, double step, GridPtr grid,
                       const BranchOptions& opts) {
  if (!(s_start > 0.0 && s_start <= 1.0 && s_end > 0.0 && s_end <= 1.0))
    throw std::invalid_argument("continue_branch: s_start and s_end must lie in (0,1]");
  if (!(step >= opts.min_step && step <= opts.max_step))
    throw std::invalid_argument("continue_branch: step must lie in [" + std::to_string(opts.min_step) + ", " +
                                std::to_string(opts.max_step) + "]");
  const ProblemParams end_params{N, s_end, alpha};
  end_params.validate();
  ProblemParams{N, s_start, alpha}.validate();

  Branch b;
  b.N = N;
  b.alpha = alpha;
  b.s_start = s_start;
  b.s_end = s_end;
  GroundState gs0 = solve_ground_state(ProblemParams{N, s_start, alpha}, grid, std::nullopt, opts.solve);
  if (!gs0.converged || !is_positive_profile(gs0.Q))
    throw SolverError(ErrorKind::branch_stall, "start state at s = " + std::to_string(s_start) + " did not converge");
  b.points.push_back(make_point(std::move(gs0)));
  b.last_good_s = s_start;

  const double dir = s_end < s_start ? -1.0 : 1.0;
  int halvings = 0;
  double h = step;
  while (dir * (s_end - b.points.back().s) > 1e-12) {
    const BranchPoint& cur = b.points.back();
    double hs = std::min(h, std::abs(s_end - cur.s));
    const double s_next = std::abs(s_end - cur.s - dir * hs) < 1e-12 ? s_end : cur.s + dir * hs;
    const RadialField pred = cur.gs.Q + cur.dQds * (s_next - cur.s);
    bool ok = false;
    std::string why;
    try {
      GroundState gs = newton_solve(ProblemParams{N, s_next, alpha}, pred, opts.solve);
      if (gs.converged && is_positive_profile(gs.Q)) {
        b.points.push_back(make_point(std::move(gs)));
        ok = true;
      } else {
        why = gs.converged ? "non-positive profile" : "corrector residual " + std::to_string(gs.residual);
      }
    } catch (const SolverError& e) {
      if (e.kind() == ErrorKind::degenerate_lplus) throw;
      why = e.what();
    }
    if (ok) {
      b.last_good_s = b.points.back().s;
      continue;
    }
    h *= 0.5;
    if (++halvings > opts.max_halvings || h < opts.min_step)
      throw SolverError(ErrorKind::branch_stall,
                        "last good s = " + std::to_string(b.last_good_s) + " (" + why + ")");
  }
  fill_bands(b);
  return b;
}

namespace {

// weights of the derivative at x0 of the interpolant through nodes x
std::vector<double> derivative_weights(const std::vector<double>& x, double x0) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      double t = 1.0 / (x[j] - x[m]);
      for (std::size_t k = 0; k < n; ++k)
        if (k != j && k != m) t *= (x0 - x[k]) / (x[j] - x[k]);
      w[j] += t;
    }
  return w;
}

}  // namespace

double mass_derivative_check(Branch& branch) {
  auto& P = branch.points;
  const std::size_t n = P.size();
  double worst = 0.0, scale = 0.0;
  for (const auto& p : P) scale = std::max(scale, std::abs(p.dMds_analytic));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // five-point centered stencil, shifted by one node next to the ends
    std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min(n - 1, i + 2);
    if (n < 4) lo = i - 1, hi = i + 1;
    std::vector<double> xs;
    for (std::size_t j = lo; j <= hi; ++j) xs.push_back(P[j].s);
    const std::vector<double> w = derivative_weights(xs, P[i].s);
    double d = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) d += w[j - lo] * P[j].M;
    P[i].dMds_numeric = d;
    P[i].mass_gap = std::abs(P[i].dMds_analytic - d) / std::max(scale, 1e-300);
    worst = std::max(worst, P[i].mass_gap);

    const double h1 = P[i].s - P[i - 1].s, h2 = P[i + 1].s - P[i].s;
    const double a = -h2 / (h1 * (h1 + h2)), c = h1 / (h2 * (h1 + h2)), bc = (h2 - h1) / (h1 * h2);
    const Eigen::VectorXd fd = a * P[i - 1].gs.Q.values() + bc * P[i].gs.Q.values() + c * P[i + 1].gs.Q.values();
    const auto& g = P[i].gs.Q.grid();
    P[i].tangent_fd_gap = l2_norm(RadialField::from_values(g, P[i].dQds.values() - fd)) / l2_norm(P[i].dQds);
  }
  return worst;
}

UniquenessResult uniqueness_probe(const ProblemParams& params, GridPtr grid, int n_starts,
                                  const std::vector<RadialField>& extra, const SolveOptions& opts) {
  if (n_starts < 2) throw std::invalid_argument("uniqueness_probe needs at least two starts");
  params.validate();
  const double R = grid->radius();
  UniquenessResult out;
  for (int k = 0; k < n_starts; ++k) {
    RadialField init;
    switch (k % 4) {
      case 0: init = gaussian_profile(grid, 1.0, R / 20.0); break;
      case 1: init = lorentzian_profile(grid, 2.0, 1.0 + 0.5 * (k / 4)); break;
      case 2: init = gaussian_profile(grid, 3.0, 0.5 + 0.25 * (k / 4)); break;
      default: init = gaussian_profile(grid, 0.5, 3.0 + (k / 4)); break;
    }
    try {
      GroundState gs = solve_ground_state(params, grid, init, opts);
      if (!gs.converged)
        out.rejected.push_back("start " + std::to_string(k) + ": residual " + std::to_string(gs.residual));
      else if (!is_positive_profile(gs.Q))
        out.rejected.push_back("start " + std::to_string(k) + ": non-positive limit");
      else
        out.solutions.push_back(gs.Q);
    } catch (const std::exception& e) {
      out.rejected.push_back("start " + std::to_string(k) + ": " + e.what());
    }
  }
  for (const auto& x : extra) {
    if (x.grid() != grid && !(x.grid()->size() == grid->size() && x.grid()->radius() == grid->radius()))
      throw std::invalid_argument("uniqueness_probe: extra candidate lives on a different grid");
    if (is_positive_profile(x))
      out.solutions.push_back(x);
    else
      out.rejected.push_back("extra candidate: non-positive");
  }
  out.accepted = static_cast<int>(out.solutions.size());
  for (std::size_t i = 0; i < out.solutions.size(); ++i)
    for (std::size_t j = i + 1; j < out.solutions.size(); ++j)
      out.max_distance = std::max(
          out.max_distance, (out.solutions[i].values() - out.solutions[j].values()).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace fraclap
