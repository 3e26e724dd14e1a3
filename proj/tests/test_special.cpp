#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "fraclap/special.hpp"

using namespace fraclap::special;
constexpr double pi = std::numbers::pi;

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(sphere_area(4) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
}

TEST_CASE("bessel J against the standard library") {
  for (double nu : {0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.7})
    for (double x : {1e-3, 0.2, 1.0, 3.3, 10.0, 47.5, 300.0}) {
      const double ref = std::cyl_bessel_j(nu, x);
      CHECK(std::abs(bessel_j(nu, x) - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("half-integer orders match elementary forms") {
  for (double x : {0.01, 0.7, 5.0, 120.0}) {
    CHECK(bessel_j(-0.5, x) == doctest::Approx(std::sqrt(2 / (pi * x)) * std::cos(x)).epsilon(1e-14));
    CHECK(bessel_j(0.5, x) == doctest::Approx(std::sqrt(2 / (pi * x)) * std::sin(x)).epsilon(1e-14));
    const double j1 = std::sqrt(2 / (pi * x)) * (std::sin(x) / x - std::cos(x));
    CHECK(std::abs(bessel_j(1.5, x) - j1) < 1e-14);
  }
  CHECK(bessel_j(0.5, 0.0) == 0.0);
}

TEST_CASE("bessel K against the standard library") {
  for (double nu : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (double x : {1e-4, 0.1, 1.0, 1.99, 2.01, 8.0, 40.0})
      CHECK(bessel_k(nu, x) == doctest::Approx(std::cyl_bessel_k(nu, x)).epsilon(1e-12));
  CHECK(bessel_k(0.5, 800.0) >= 0.0);
}

TEST_CASE("bessel zeros against boost") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    const auto z = bessel_j_zeros(nu, 200);
    REQUIRE(z.size() == 200);
    for (int k = 0; k < 200; k += 7) {
      const double ref = boost::math::cyl_bessel_j_zero(nu, k + 1);
      CHECK(std::abs(z[k] - ref) <= 1e-12 * ref);
    }
    for (int k = 1; k < 200; ++k) CHECK(z[k] > z[k - 1]);
  }
  // J_{1/2} zeros are k pi, J_{-1/2} zeros are (k - 1/2) pi
  const auto a = bessel_j_zeros(0.5, 50), b = bessel_j_zeros(-0.5, 50);
  for (int k = 0; k < 50; ++k) {
    CHECK(a[k] == doctest::Approx((k + 1) * pi).epsilon(1e-14));
    CHECK(b[k] == doctest::Approx((k + 0.5) * pi).epsilon(1e-14));
  }
}

TEST_CASE("extension constant") {
  CHECK(dn_constant(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  for (double s : {0.1, 0.25, 0.75, 0.9})
    CHECK(dn_constant(s) == doctest::Approx(std::pow(2.0, 2 * s - 1) * std::tgamma(s) / std::tgamma(1 - s)).epsilon(1e-14));
}

TEST_CASE("per-mode extension profile") {
  // s = 1/2: phi(tau) = exp(-tau)
  for (double t : {0.0, 1e-6, 0.3, 1.0, 2.0, 7.0, 30.0}) {
    CHECK(extension_profile(0.5, t) == doctest::Approx(std::exp(-t)).epsilon(1e-13));
    CHECK(extension_profile_derivative(0.5, t) == doctest::Approx(-std::exp(-t)).epsilon(1e-13));
  }
  for (double s : {0.2, 0.4, 0.6, 0.8}) {
    CHECK(extension_profile(s, 0.0) == 1.0);
    double prev = 1.0;
    for (double t = 0.05; t < 20; t *= 1.3) {
      const double p = extension_profile(s, t);
      CHECK(p < prev);
      CHECK(p > 0.0);
      prev = p;
      const double h = 1e-5 * t;
      const double fd = (extension_profile(s, t + h) - extension_profile(s, t - h)) / (2 * h);
      CHECK(extension_profile_derivative(s, t) == doctest::Approx(fd).epsilon(1e-7));
      CHECK(extension_flux(s, t) == doctest::Approx(std::pow(t, 1 - 2 * s) * extension_profile_derivative(s, t)).epsilon(1e-13));
    }
    // the limit is approached like tau^{2-2s}
    CHECK(extension_flux(s, 1e-9) == doctest::Approx(-1.0 / dn_constant(s)).epsilon(3.0 * std::pow(1e-9, 2 - 2 * s) + 1e-12));
  }
}
