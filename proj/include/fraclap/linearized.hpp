#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <vector>

#include "fraclap/spectral.hpp"

namespace fraclap {

struct GroundState;

// Operator m(-Delta_l) + diag(potential) on one sector grid. Internally it acts on
// weighted nodal vectors y = sqrt(w) f, where it is symmetric:
//   A = U diag(symbol) U + diag(potential).
class SectorOperator {
 public:
  SectorOperator(GridPtr grid, Eigen::VectorXd symbol, Eigen::VectorXd potential);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& symbol() const { return symbol_; }
  const Eigen::VectorXd& potential() const { return potential_; }
  int size() const { return grid_->size(); }

  // action on nodal values
  Eigen::VectorXd apply(const Eigen::VectorXd& values) const;
  // action on weighted nodal vectors
  Eigen::VectorXd apply_weighted(const Eigen::VectorXd& y) const;
  // preconditioner: inverse of the kinetic part only, on weighted vectors
  Eigen::VectorXd precondition_weighted(const Eigen::VectorXd& y) const;

  // dense symmetric matrix in weighted nodal coordinates (built on first use)
  const Eigen::MatrixXd& matrix() const;

  // Solve L f = g for nodal values. Dense LU up to dense_limit, preconditioned
  // GMRES beyond. Throws SolverError(newton_singular) on numerical singularity.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double* rel_residual = nullptr) const;

  static constexpr int dense_limit = 2048;

 private:
  GridPtr grid_;
  Eigen::VectorXd symbol_, potential_;
  mutable std::once_flag matrix_once_, lu_once_;
  mutable Eigen::MatrixXd matrix_;
  mutable std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  mutable double rcond_ = 0.0;
};

// (-Delta_l)^s + shift on the given grid
SectorOperator free_operator(GridPtr grid, double s, double shift = 1.0);

// L_{+,l} = (-Delta_l)^s + 1 - (alpha+1)|Q|^alpha on the sector's grid with the
// ground state's R and M. The l = 0 case reuses the ground-state grid.
SectorOperator assemble_lplus(const GroundState& gs, SectorIndex sector);

// L_{+,0} on the ground-state grid with a given profile (used inside Newton)
SectorOperator lplus_radial(const RadialField& Q, double s, double alpha);

struct SectorSpectrum {
  SectorIndex sector;
  std::vector<double> eigenvalues;       // k lowest, ascending
  std::vector<RadialField> eigenfields;  // L^2-normalized, matching
  std::vector<double> all_eigenvalues;   // full spectrum, ascending
  int negative_count = 0;
  std::vector<double> near_zero;
  double zero_tol = 0.0;
};

double zero_tolerance(const RadialGrid& grid, double s);

SectorSpectrum sector_spectrum(const SectorOperator& op, int k, double zero_tol);

struct SectorReport {
  SectorIndex sector;
  double lowest = 0.0;
  double second = 0.0;
  double distance_to_zero = 0.0;  // min |eigenvalue|
  int negative_count = 0;
  int zero_modes = 0;
  double qprime_cosine = 0.0;  // only for l = 1
  bool pass = false;
};

struct NondegeneracyReport {
  double zero_tol = 0.0;
  std::vector<SectorReport> sectors;
  bool ordered = false;  // lowest eigenvalue strictly increasing in l
  bool pass = false;
};

NondegeneracyReport nondegeneracy_report(const GroundState& gs, int ell_max);

// counts strict sign alternations among samples with |f| > threshold_rel * max|f|
int sign_changes(const Eigen::VectorXd& values, double threshold_rel = 1e-8);
int sign_changes(const RadialField& f, double threshold_rel = 1e-8);

}  // namespace fraclap
