#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fraclap/spectral.hpp"

namespace fraclap {

// Log-uniform levels t covering every mode of the grid: from where the energy below
// tau = sqrt(mu_max) t is under 1e-13 up to sqrt(mu_min) t = 40.
std::vector<double> default_levels(const RadialGrid& grid, double s, double log_step = 0.2);

// s-harmonic extension of f: mode k at level t carries c_k phi_s(sqrt(mu_k) t).
// Matrices are (nodes x levels).
struct ExtensionField {
  RadialField base;
  double s = 0.5;
  std::vector<double> levels;
  Eigen::MatrixXd coeffs;  // c_k phi_s(sqrt(mu_k) t_j)
  Eigen::MatrixXd u, u_r, u_t, flux;  // flux = t^{1-2s} u_t
  double collocation_residual = 0.0;  // max relative residual of the mode ODE
};

ExtensionField extend(const RadialField& f, double s, std::vector<double> levels);

// -d_s lim t^{1-2s} u_t extrapolated from three small levels, compared with (-Delta)^s f
struct DirichletNeumann {
  double residual = 0.0;  // relative L^2 gap
  double observed_ratio = 0.0;  // successive-difference ratio (expected 2^{2-2s})
  RadialField neumann;  // -d_s lim t^{1-2s} u_t
};
DirichletNeumann dirichlet_neumann_check(const RadialField& f, double s);

// lim_{t->0} t^{1-2s} d/dt phi_s(sqrt(mu) t), extrapolated numerically
double mode_flux_limit(double s, double mu);
// mu^s / (-mode_flux_limit); equals d_s
double recovered_dn_constant(double s, double mu);

struct TraceReport {
  double lhs = 0.0;    // int int t^a |grad u|^2
  double rhs = 0.0;    // (1/d_s) int |(-Delta)^{s/2} f|^2
  double ratio = 0.0;
  double quadrature_estimate = 0.0;  // relative change when the t step is doubled
};

// With a bump b(t) (b(0) = 0), the extension is replaced by u (1 + eps b(t)),
// which keeps the trace but is not s-harmonic.
TraceReport trace_inequality_check(const RadialField& f, double s,
                                   const std::function<double(double)>& bump = nullptr,
                                   const std::function<double(double)>& bump_derivative = nullptr,
                                   double eps = 0.0);

struct MonotoneH {
  std::vector<double> radii;     // grid nodes
  std::vector<double> H_values;  // H at the nodes
  double H0 = 0.0;               // H(0)
  double H_far = 0.0;            // H at the node nearest 0.8 R
  double bound0 = 0.0;           // -V(0) u(0)^2 / 2
  double d_s = 0.0;
  double max_increase = 0.0;     // max_q (H_{q+1} - H_q), positive part
  double max_abs = 0.0;
  double vertical_energy0 = 0.0;  // int t^a u_t(0,t)^2 dt
};

// H(r) = d_s int t^a/2 (u_r^2 - u_t^2) dt - V(r) u(r)^2 / 2
MonotoneH monotone_H(const RadialField& u, const RadialField& V, double s, std::vector<double> levels = {});

}  // namespace fraclap
