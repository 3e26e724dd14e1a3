#pragma once

#include <limits>
#include <optional>

#include "fraclap/spectral.hpp"

namespace fraclap {

struct ProblemParams {
  int N = 1;
  double s = 0.5;
  double alpha = 1.0;

  // 4s/(N-2s) for s < N/2, +infinity otherwise
  static double critical_exponent(double s, int N);
  bool admissible() const;
  void validate() const;  // throws std::invalid_argument naming alpha_*
};

struct SolveOptions {
  int max_petviashvili = 500;
  int max_newton = 50;
  double tol = 1e-9;
  double switch_tol = 1e-4;
};

struct TailFit {
  double C_fit = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  // next-order coefficient b in r^{N+2s} f ~ C_fit + b r^{-2s}, when fitted
  double correction = 0.0;
};

struct GroundState {
  ProblemParams params;
  RadialField Q;
  double M = 0.0, T = 0.0, V = 0.0;
  double pohozaev1_residual = 0.0;
  double pohozaev2_residual = 0.0;
  double tail_constant = std::numeric_limits<double>::quiet_NaN();
  double tail_residual = std::numeric_limits<double>::quiet_NaN();
  double weinstein_J = 0.0;
  int petviashvili_iterations = 0;
  int newton_iterations = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

double weinstein_J(const RadialField& u, const ProblemParams& params);

// ||(-Delta)^s Q + Q - |Q|^alpha Q||_2 / ||Q||_2, recomputed from scratch
double equation_residual(const RadialField& Q, const ProblemParams& params);

RadialField gaussian_profile(GridPtr grid, double height, double width);
RadialField lorentzian_profile(GridPtr grid, double height, double width);

// Petviashvili iteration followed by Newton polish. With no init, a unit-height
// Gaussian of width R/20 is used.
GroundState solve_ground_state(const ProblemParams& params, GridPtr grid,
                               const std::optional<RadialField>& init = std::nullopt,
                               const SolveOptions& opts = {});

// Newton only, from a nearby profile; used as continuation corrector.
GroundState newton_solve(const ProblemParams& params, const RadialField& init, const SolveOptions& opts = {});

// fills norms, Pohozaev residuals, J and the tail fit (if a plateau exists)
void finalize(GroundState& gs);

std::pair<double, double> pohozaev_check(const GroundState& gs);

// plateau of r^{N+2s} Q(r) over [0.1R, 0.25R]; throws SolverError(no_plateau) if residual > 0.1
TailFit tail_fit(const GroundState& gs);

}  // namespace fraclap
