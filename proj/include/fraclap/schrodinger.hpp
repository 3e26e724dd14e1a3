#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fraclap/linearized.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

// Bounded radial potential. Shifted potentials fold an eigenvalue in: V - E.
class PotentialSpec {
 public:
  enum class Kind { gaussian, sampled, shifted };

  // V(r) = -g exp(-(r/width)^2)
  static PotentialSpec gaussian(double g, double width = 1.0);
  static PotentialSpec sampled(RadialField samples);
  static PotentialSpec shifted(const PotentialSpec& base, double E);

  Kind kind() const { return kind_; }
  double coupling() const { return g_; }
  double width() const { return width_; }
  double shift() const { return shift_; }
  bool monotone_nondecreasing() const { return monotone_; }
  const RadialField& samples() const { return samples_; }

  double operator()(double r) const;
  Eigen::VectorXd at_nodes(const RadialGrid& grid) const;

 private:
  Kind kind_ = Kind::gaussian;
  double g_ = 0.0, width_ = 1.0, shift_ = 0.0;
  bool monotone_ = false;
  RadialField samples_;
  std::shared_ptr<const PotentialSpec> base_;
};

// (-Delta)^s + V on the grid's sector
SectorOperator schrodinger_operator(GridPtr grid, double s, const PotentialSpec& V);

// k lowest eigenpairs; also reports the smallest adjacent gap among them
struct RadialSpectrum {
  SectorSpectrum spectrum;
  double min_gap = 0.0;
};
RadialSpectrum radial_spectrum(double s, const PotentialSpec& V, GridPtr grid, int k);

// Harmonic-oscillator trial pair psi_1, psi_2 and the 2x2 matrices
// t_jk = (psi_j, (-Delta)^s psi_k), v_jk = (psi_j, e^{-x^2} psi_k) in closed form.
struct TrialMatrices {
  Eigen::Matrix2d T, V;
};
TrialMatrices trial_matrices(double s, int N);
double trial_psi1(int N, double r);
double trial_psi2(int N, double r);
// Gram matrix of the trial pair by quadrature on the grid
Eigen::Matrix2d trial_overlap(const RadialGrid& grid);
// smallest g with T - g V negative definite
double trial_coupling_bound(double s, int N);

struct CouplingResult {
  double g_star = 0.0;       // bisection estimate
  double matrix_bound = 0.0;  // closed-form trial bound
  double E2 = 0.0;           // second eigenvalue at g_star
  int bisection_steps = 0;
};

struct CouplingOptions {
  double R = 60.0;
  int M = 512;
  double threshold = -1e-6;
  double rel_tol = 1e-3;
  double g_max = 1e3;
};

// Smallest g for which (-Delta)^s - g e^{-r^2} has a second radial eigenvalue
// below the threshold. Throws SolverError(bracket_failure) past g_max.
CouplingResult find_two_state_coupling(double s, int N, const CouplingOptions& opts = {});

struct HomotopyState {
  double kappa = 0.0;
  int leg = 1;
  double tau = 0.0;
  double s_kappa = 0.0;
  Eigen::VectorXd V_kappa;  // effective potential at the nodes
  double E1 = 0.0, E2 = 0.0;
  RadialField psi2;
  int sign_changes = 0;
  double overlap = 1.0;  // with the previous knot's psi2
  int refinements = 0;
};

// Potential and order of the three-leg family on leg in {1,2,3} at tau in [0,1]:
//   1: (-Delta)^{s0} + V + tau W
//   2: (-Delta)^{s0} + (1 - tau) V + W
//   3: (-Delta)^{(1 - tau) s0 + tau} + W
SectorOperator homotopy_operator(GridPtr grid, double s0, const PotentialSpec& V, const PotentialSpec& W,
                                 int leg, double tau);
// kappa in [0,1] mapped onto (leg, tau)
std::pair<int, double> homotopy_leg(double kappa);

struct HomotopyOptions {
  int steps_per_leg = 32;
  double min_overlap = 0.9;
  int max_refinements = 3;
};

// Walks kappa over 3*steps_per_leg + 1 uniform knots. The sign of psi2 follows by
// continuity; a knot whose overlap stays below min_overlap after the allowed
// refinements raises SolverError(continuity_break).
std::vector<HomotopyState> homotopy_run(double s0, const PotentialSpec& V, const PotentialSpec& W, GridPtr grid,
                                        const HomotopyOptions& opts = {});

// max |E2(k_{i+1}) - E2(k_i)| over a run
double max_eigenvalue_jump(const std::vector<HomotopyState>& run);

// Tail of an eigenfunction with E < 0.
//   s < 1: psi r^{N+2s} ~ C + b r^{-2s} + c r^{-4s} on [0.1R, 0.25R]
//   s = 1: log|psi r^{(N-1)/2}| linear on [0.4R, 0.7R] with slope -sqrt(-E)
struct EigenTail {
  double coefficient = 0.0;        // C (s < 1) or exp(intercept) with sign (s = 1)
  double exponent_residual = 0.0;  // s = 1: |slope + sqrt(-E)| / sqrt(-E); s < 1: fit misfit / |C|
  double slope = 0.0;              // s = 1 only
  double integral_Vpsi = 0.0;
  bool sign_opposite = false;  // sign(C) = -sign(int V psi)
};
EigenTail eigen_tail_fit(const RadialField& psi, double s, double E, const PotentialSpec& V);

// (|f|, (-Delta)^s |f|) and (f, (-Delta)^s f)
struct KatoForms {
  double abs_form = 0.0;
  double form = 0.0;
};
KatoForms kato_forms(const RadialField& f, double s);

}  // namespace fraclap
