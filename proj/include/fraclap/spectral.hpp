#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fraclap {

struct SectorIndex {
  int N = 1;
  int ell = 0;

  double nu() const { return ell + 0.5 * (N - 2); }
  // radial functions are r^{-p} J_nu(k r) with p = (N-2)/2
  double power() const { return 0.5 * (N - 2); }
  void validate() const;
  bool operator==(const SectorIndex&) const = default;
};

// Fourier–Bessel discretization of one angular-momentum sector on the ball B_R
// with a Dirichlet condition at r = R. Immutable once built.
class RadialGrid {
 public:
  RadialGrid(SectorIndex sector, double R, int M);

  const SectorIndex& sector() const { return sector_; }
  double radius() const { return R_; }
  int size() const { return M_; }
  const Eigen::VectorXd& nodes() const { return r_; }
  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::VectorXd& sqrt_weights() const { return sw_; }
  const Eigen::VectorXd& eigenvalues() const { return mu_; }
  const Eigen::VectorXd& zeros() const { return j_; }
  // symmetric orthogonal transform: coeffs = U (sqrt(w) .* values)
  const Eigen::MatrixXd& transform() const { return U_; }
  // ||Y^2 - I|| estimate of the raw Hankel matrix before correction
  double raw_defect() const { return raw_defect_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& values) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& coeffs) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& values) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& coeffs) const;

  // normalized basis function phi_k (k zero-based) and its radial derivative
  double basis(int k, double r) const;
  double basis_derivative(int k, double r) const;
  // rows: radii, columns: modes
  Eigen::MatrixXd synthesis(std::span<const double> radii, bool derivative = false) const;

 private:
  SectorIndex sector_;
  double R_;
  int M_;
  Eigen::VectorXd j_, r_, w_, sw_, mu_, amp_;
  Eigen::MatrixXd U_;
  double raw_defect_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(SectorIndex sector, double R, int M);

// Samples of a radial function at grid nodes together with its coefficients.
class RadialField {
 public:
  RadialField() = default;
  static RadialField from_values(GridPtr grid, Eigen::VectorXd values);
  static RadialField from_coeffs(GridPtr grid, Eigen::VectorXd coeffs);
  static RadialField from_function(GridPtr grid, const std::function<double(double)>& f);
  static RadialField mode(GridPtr grid, int k);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  int size() const { return static_cast<int>(values_.size()); }
  bool empty() const { return !grid_; }

  // spectral synthesis off the nodes
  double at(double r) const;
  Eigen::VectorXd evaluate(std::span<const double> radii) const;
  Eigen::VectorXd derivative(std::span<const double> radii) const;
  // r-derivative at the grid's own nodes
  Eigen::VectorXd derivative_at_nodes() const;
  double value_at_origin() const { return at(0.0); }

  RadialField operator+(const RadialField& o) const;
  RadialField operator-(const RadialField& o) const;
  RadialField operator*(double a) const;

 private:
  RadialField(GridPtr g, Eigen::VectorXd v, Eigen::VectorXd c)
      : grid_(std::move(g)), values_(std::move(v)), coeffs_(std::move(c)) {}
  GridPtr grid_;
  Eigen::VectorXd values_;
  Eigen::VectorXd coeffs_;
};

using Multiplier = std::function<double(double)>;

RadialField apply_multiplier(const RadialField& f, const Multiplier& m);
RadialField fractional_laplacian(const RadialField& f, double s);
RadialField log_laplacian_s(const RadialField& f, double s);

struct Norms {
  double M = 0.0;  // int |f|^2
  double T = 0.0;  // int |(-Delta)^{s/2} f|^2
  double V = 0.0;  // int |f|^{alpha+2}
};
Norms norms(const RadialField& f, double s, double alpha);

// quadrature inner product over R^N
double inner(const RadialField& f, const RadialField& g);
double l2_norm(const RadialField& f);
// (f, m(-Delta) g) computed spectrally
double quadratic_form(const RadialField& f, const RadialField& g, const Multiplier& m);

}  // namespace fraclap
