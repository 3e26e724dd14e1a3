#pragma once

#include <limits>
#include <vector>

#include "fraclap/ground_state.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

struct TangentResult {
  RadialField dQds;
  double residual = 0.0;       // ||L_+ dQds - rhs|| / ||rhs||
  double min_abs_eig = 0.0;    // smallest |eigenvalue| of L_{+,0}
  int morse_index = 0;         // negative eigenvalues of L_{+,0}
};

// Solves L_+ dQ/ds = -(-Delta)^s log(-Delta) Q on the ground state's grid. Raises
// SolverError(degenerate_lplus) if L_{+,0} has an eigenvalue within zero_tol of 0.
TangentResult tangent(const GroundState& gs);

// ||L_+ ((2s/alpha) Q + r Q') + 2s Q|| / ||2s Q||
double scaling_identity_residual(const GroundState& gs);

// (1/2s) [ (4s/alpha + 2s - N) (Q, (-Delta)^s log(-Delta) Q) + 2 (Q, (-Delta)^s Q) ]
double mass_derivative_identity(const GroundState& gs);

struct BranchPoint {
  double s = 0.0;
  GroundState gs;
  RadialField dQds;
  double M = 0.0, T = 0.0, V = 0.0;
  double tangent_residual = 0.0;
  double min_abs_eig = 0.0;
  int morse_index = 0;
  int corrector_iterations = 0;
  double dMds_analytic = 0.0;
  double dMds_numeric = std::numeric_limits<double>::quiet_NaN();
  double mass_gap = std::numeric_limits<double>::quiet_NaN();     // relative to max |dM/ds| on the branch
  double tangent_fd_gap = std::numeric_limits<double>::quiet_NaN();  // relative, L^2
  double tail_bound = 0.0;  // max_r Q(r) r^N
};

struct Branch {
  int N = 1;
  double alpha = 1.0;
  double s_start = 1.0, s_end = 0.5;
  std::vector<BranchPoint> points;
  double M_min = 0.0, M_max = 0.0, T_min = 0.0, T_max = 0.0, V_min = 0.0, V_max = 0.0;
  double last_good_s = 0.0;
};

struct BranchOptions {
  double min_step = 1e-3;
  double max_step = 0.05;
  int max_halvings = 6;
  SolveOptions solve;
};

// Predictor (tangent) - corrector (Newton) continuation on a fixed grid from
// s_start to s_end. The grid must suit the smallest s on the branch. Raises
// SolverError(branch_stall) when the step falls below min_step or the halving
// budget runs out.
Branch continue_branch(int N, double alpha, double s_start, double s_end, double step, GridPtr grid,
                       const BranchOptions& opts = {});

// Fills dMds_numeric (five-point centered differences, four-point next to the
// ends) and mass_gap at interior points, and the three-point tangent_fd_gap.
// The mass gap is scaled by the branch's largest |dM/ds| since dM/ds itself may
// cross zero. Returns the largest mass gap.
double mass_derivative_check(Branch& branch);

struct UniquenessResult {
  double max_distance = 0.0;   // pairwise max-norm over accepted solutions
  int accepted = 0;
  std::vector<std::string> rejected;  // non-convergent or non-positive starts
  std::vector<RadialField> solutions;
};

// Solves from n_starts distinct positive initial profiles (plus any extra
// candidates, e.g. a branch endpoint) and compares them pairwise in max norm.
UniquenessResult uniqueness_probe(const ProblemParams& params, GridPtr grid, int n_starts,
                                  const std::vector<RadialField>& extra = {}, const SolveOptions& opts = {});

// true if Q is a positive profile (min over nodes above -tol * max)
bool is_positive_profile(const RadialField& Q, double tol = 1e-8);

}  // namespace fraclap
