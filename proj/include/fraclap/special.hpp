#pragma once

#include <vector>

namespace fraclap::special {

// Surface area of the unit sphere S^{N-1} (N = 1 counts the two points).
double sphere_area(int N);

// J_nu(x) for nu >= -1/2 and x >= 0. Half-integer orders use closed forms.
double bessel_j(double nu, double x);

// K_nu(x), x > 0. Returns 0 once the value underflows.
double bessel_k(double nu, double x);

// First `count` positive zeros of J_nu, ascending, refined by Newton.
std::vector<double> bessel_j_zeros(double nu, int count);

// Caffarelli–Silvestre constant d_s = 2^{2s-1} Gamma(s) / Gamma(1-s).
double dn_constant(double s);

// Per-mode extension profile phi_s(tau) = 2^{1-s}/Gamma(s) tau^s K_s(tau); phi_s(0) = 1.
double extension_profile(double s, double tau);
// d/dtau phi_s(tau) = -2^{1-s}/Gamma(s) tau^s K_{1-s}(tau).
double extension_profile_derivative(double s, double tau);
// tau^{1-2s} phi_s'(tau); tends to -1/d_s as tau -> 0.
double extension_flux(double s, double tau);

}  // namespace fraclap::special
