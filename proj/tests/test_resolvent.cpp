#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <numbers>

#include "fraclap/errors.hpp"
#include "fraclap/resolvent.hpp"

using namespace fraclap;
constexpr double pi = std::numbers::pi;

namespace {

// F^{-1}[1/(|xi| + lambda)] on the line, through the sine and cosine integrals
double bo_resolvent(double lambda, double x) {
  const double z = lambda * x;
  return (-std::cos(z) * gsl_sf_Ci(z) + std::sin(z) * (pi / 2 - gsl_sf_Si(z))) / pi;
}

// Poisson kernel: the s = 1/2 heat kernel
double poisson(int N, double t, double r) {
  return std::tgamma(0.5 * (N + 1)) / std::pow(pi, 0.5 * (N + 1)) * t / std::pow(t * t + r * r, 0.5 * (N + 1));
}

}  // namespace

TEST_CASE("one-dimensional half-Laplacian resolvent against Ci/Si") {
  for (double lambda : {0.5, 1.0, 3.0})
    for (double x : {1e-3, 0.1, 0.9, 4.0, 25.0, 300.0}) {
      const double ref = bo_resolvent(lambda, x);
      CHECK(resolvent_kernel_at(0.5, lambda, 1, x) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("resolvent scaling in lambda") {
  // G_lambda(r) = lambda^{N/2s - 1} G_1(lambda^{1/2s} r)
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.6, 0.85}) {
      const double lam = 2.7;
      for (double r : {0.05, 1.0, 12.0}) {
        const double lhs = resolvent_kernel_at(s, lam, N, r);
        const double rhs = std::pow(lam, N / (2 * s) - 1) * resolvent_kernel_at(s, 1.0, N, std::pow(lam, 1 / (2 * s)) * r);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
      }
    }
}

TEST_CASE("resolvent is positive, decreasing and monotone in lambda") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.25, 0.5, 0.75}) {
      const KernelProfile a = resolvent_kernel(s, 1.0, N, log_radii(1e-2, 1e4, 8));
      const KernelProfile b = resolvent_kernel(s, 1.2, N, a.radii);
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] > 0.0);
        CHECK(b.values[i] < a.values[i]);
        if (i) CHECK(a.values[i] < a.values[i - 1]);
      }
    }
}

TEST_CASE("resolvent mass is 1/lambda") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.5, 0.75})
      for (double lam : {0.5, 2.0}) {
        const KernelProfile kp = resolvent_kernel(s, lam, N, log_radii(1e-3, 1e5, 12));
        CHECK(std::abs(lam * kp.l1_norm - 1.0) < 1e-4);
      }
}

TEST_CASE("tail constant scales like lambda^{-2}") {
  for (int N = 1; N <= 3; ++N) {
    const double s = 0.5;
    const double c1 = resolvent_kernel(s, 1.0, N, log_radii(1e-3, 1e5, 12)).tail_constant;
    const double c2 = resolvent_kernel(s, 2.0, N, log_radii(1e-3, 1e5, 12)).tail_constant;
    CHECK(c2 * 4.0 == doctest::Approx(c1).epsilon(0.02));
  }
  // BO: G ~ 1/(pi lambda^2 x^2)
  const double c = resolvent_kernel(0.5, 1.0, 1, log_radii(1e-3, 1e5, 12)).tail_constant;
  CHECK(c == doctest::Approx(1.0 / pi).epsilon(1e-3));
}

TEST_CASE("tail fit reports a missing plateau") {
  CHECK_THROWS_AS(resolvent_kernel(0.5, 1.0, 1, log_radii(1e-2, 1.0, 8)), SolverError);
}

TEST_CASE("heat kernel at s = 1/2 is the Poisson kernel") {
  for (int N = 1; N <= 3; ++N)
    for (double t : {0.3, 1.0, 4.0})
      for (double r : {0.0, 0.5, 2.0, 30.0})
        CHECK(heat_kernel(0.5, t, N, r) == doctest::Approx(poisson(N, t, r)).epsilon(1e-7));
}

TEST_CASE("heat kernel at s = 1 is the Gaussian") {
  for (int N = 1; N <= 3; ++N)
    for (double r : {0.0, 0.7, 3.0}) {
      const double t = 0.8;
      CHECK(heat_kernel(1.0, t, N, r) ==
            doctest::Approx(std::pow(4 * pi * t, -0.5 * N) * std::exp(-r * r / (4 * t))).epsilon(1e-7));
    }
}

TEST_CASE("heat kernel conserves mass") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.5, 0.8, 1.0}) CHECK(std::abs(heat_kernel_mass(s, 1.0, N) - 1.0) < 1e-6);
}

TEST_CASE("heat kernel two-sided bound") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.7}) {
      const HeatBoundReport h = heat_kernel_bound_check(s, 1.0, N, log_radii(1e-2, 1e3, 6));
      CHECK(h.lower_constant > 0.0);
      CHECK(h.upper_constant < 10.0);
      CHECK(h.lower_constant <= h.upper_constant);
    }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(resolvent_kernel_at(1.0, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(resolvent_kernel_at(0.5, -1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(log_radii(1.0, 0.5, 4), std::invalid_argument);
  CHECK(log_radii(1.0, 100.0, 5).size() == 11);
}
