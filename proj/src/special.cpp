#include "fraclap/special.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fraclap::special {

namespace {

constexpr double pi = std::numbers::pi;

bool is_half_integer(double nu, int& n) {
  const double t = nu + 0.5;
  if (std::abs(t - std::round(t)) > 1e-14) return false;
  n = static_cast<int>(std::round(t));
  return true;
}

// Spherical Bessel j_n(x) via upward recurrence where stable, series otherwise.
double spherical_j(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) return std::sin(x) / x;
  if (x < 0.5 + n) {
    // power series: j_n(x) = x^n / (2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...)
    double pref = 1.0;
    for (int k = 1; k <= n; ++k) pref *= x / (2.0 * k + 1.0);
    double term = 1.0, sum = 1.0;
    const double z = -0.5 * x * x;
    for (int k = 1; k < 60; ++k) {
      term *= z / (k * (2.0 * n + 2.0 * k + 1.0));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return pref * sum;
  }
  double jm = std::sin(x) / x;
  double j = std::sin(x) / (x * x) - std::cos(x) / x;
  for (int k = 1; k < n; ++k) {
    const double jp = (2.0 * k + 1.0) / x * j - jm;
    jm = j;
    j = jp;
  }
  return j;
}

}  // namespace

double sphere_area(int N) {
  switch (N) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    default:
      return 2.0 * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
  }
}

double bessel_j(double nu, double x) {
  if (x < 0.0) throw std::domain_error("bessel_j: negative argument");
  int n = 0;
  if (is_half_integer(nu, n)) {
    if (n == 0) {
      if (x == 0.0) throw std::domain_error("bessel_j: J_{-1/2} singular at 0");
      return std::sqrt(2.0 / (pi * x)) * std::cos(x);
    }
    const int l = n - 1;  // nu = l + 1/2
    if (x == 0.0) return 0.0;
    return std::sqrt(2.0 * x / pi) * spherical_j(l, x);
  }
  if (nu == std::round(nu) && nu >= 0.0) {
    const int n = static_cast<int>(nu);
    if (n == 0) return ::j0(x);
    if (n == 1) return ::j1(x);
    return ::jn(n, x);
  }
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_k(double nu, double x) {
  if (x <= 0.0) throw std::domain_error("bessel_k: nonpositive argument");
  if (x > 700.0) return 0.0;
  return boost::math::cyl_bessel_k(nu, x);
}

std::vector<double> bessel_j_zeros(double nu, int count) {
  if (nu < -0.5) throw std::domain_error("bessel_j_zeros: order below -1/2");
  if (count <= 0) return {};
  std::vector<double> z;
  z.reserve(count);
  int n = 0;
  if (is_half_integer(nu, n) && n <= 1) {
    for (int k = 1; k <= count; ++k) z.push_back((n == 0 ? k - 0.5 : double(k)) * pi);
    return z;
  }
  auto f = [nu](double x) { return bessel_j(nu, x); };
  auto df = [nu](double x) { return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x); };
  auto newton = [&](double x) {
    for (int it = 0; it < 50; ++it) {
      const double dx = f(x) / df(x);
      x -= dx;
      if (std::abs(dx) < 1e-15 * x) break;
    }
    return x;
  };
  // scan the first few sign changes, then McMahon guesses
  const int scanned = std::min(count, 6);
  double a = std::max(nu, 0.0) + 1e-3;
  double fa = f(a);
  const double h = 0.05;
  while (static_cast<int>(z.size()) < scanned) {
    const double b = a + h;
    const double fb = f(b);
    if (fa == 0.0 || fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      z.push_back(newton(0.5 * (lo + hi)));
    }
    a = b;
    fa = fb;
  }
  const double m4 = 4.0 * nu * nu;
  for (int k = scanned + 1; k <= count; ++k) {
    const double beta = (k + 0.5 * nu - 0.25) * pi;
    const double e = 8.0 * beta;
    double guess = beta - (m4 - 1.0) / e - 4.0 * (m4 - 1.0) * (7.0 * m4 - 31.0) / (3.0 * e * e * e);
    const double x = newton(guess);
    if (!(x > z.back() + 2.0 && x < z.back() + 4.5))
      throw std::runtime_error("bessel_j_zeros: Newton lost zero " + std::to_string(k));
    z.push_back(x);
  }
  return z;
}

double dn_constant(double s) {
  return std::pow(2.0, 2.0 * s - 1.0) * std::tgamma(s) / std::tgamma(1.0 - s);
}

double extension_profile(double s, double tau) {
  if (tau <= 0.0) return 1.0;
  if (std::abs(s - 0.5) < 1e-15) return std::exp(-tau);
  if (tau > 700.0) return 0.0;
  return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(tau, s) * bessel_k(s, tau);
}

double extension_profile_derivative(double s, double tau) {
  if (std::abs(s - 0.5) < 1e-15) return -std::exp(-tau);
  if (tau <= 0.0) {
    if (s > 0.5) return 0.0;
    throw std::domain_error("extension_profile_derivative: singular at 0");
  }
  if (tau > 700.0) return 0.0;
  return -std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(tau, s) * bessel_k(1.0 - s, tau);
}

double extension_flux(double s, double tau) {
  if (tau <= 0.0) return -1.0 / dn_constant(s);
  if (std::abs(s - 0.5) < 1e-15) return -std::exp(-tau);
  if (tau > 700.0) return 0.0;
  // tau^{1-2s} tau^s K_{1-s} = tau^{1-s} K_{1-s}
  return -std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(tau, 1.0 - s) * bessel_k(1.0 - s, tau);
}

}  // namespace fraclap::special
