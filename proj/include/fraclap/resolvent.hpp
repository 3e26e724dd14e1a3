#pragma once

#include <vector>

#include "fraclap/ground_state.hpp"

namespace fraclap {

// Pointwise kernel of ((-Delta)^s + lambda)^{-1} on R^N, r > 0.
double resolvent_kernel_at(double s, double lambda, int N, double r);

struct KernelProfile {
  double s = 0.0;
  double lambda = 0.0;
  int N = 1;
  std::vector<double> radii;
  std::vector<double> values;
  double l1_norm = 0.0;
  double tail_constant = 0.0;  // plateau of r^{N+2s} G(r)
  double tail_residual = 0.0;
  double tail_correction = 0.0;
};

// Samples G at the radii; the L^1 norm integrates G over [0, r_max] and adds the
// fitted algebraic tail beyond r_max.
KernelProfile resolvent_kernel(double s, double lambda, int N, std::vector<double> radii);

// plateau of r^{N+2s} G over the last decade of radii, extrapolated with the
// next-order r^{-2s} correction; SolverError(no_plateau) if the raw relative
// variation exceeds 0.05
TailFit kernel_tail_fit(const KernelProfile& profile);

// per_decade log-spaced radii in [r0, r1]
std::vector<double> log_radii(double r0, double r1, int per_decade);

// Fractional heat kernel p_s(t, r) = F^{-1}[exp(-t |xi|^{2s})], N in {1, 2, 3}.
double heat_kernel(double s, double t, int N, double r);

// |S^{N-1}| int_0^inf p_s(t, r) r^{N-1} dr, with a fitted tail beyond 1e4 t^{1/2s}
double heat_kernel_mass(double s, double t, int N);

struct HeatBoundReport {
  double s = 0.0, t = 0.0;
  int N = 1;
  std::vector<double> radii, values;
  // sup and inf over samples of p / min(t^{-N/2s}, r^{-N})
  double upper_constant = 0.0;
  double lower_constant = 0.0;
};

HeatBoundReport heat_kernel_bound_check(double s, double t, int N, const std::vector<double>& radii);

}  // namespace fraclap
