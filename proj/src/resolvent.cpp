#include "fraclap/resolvent.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fraclap/errors.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

namespace {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

void check_params(double s, double lambda, int N) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("resolvent: s must lie in (0, 1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be positive");
  if (N < 1 || N > 3) throw std::invalid_argument("resolvent: N must be 1, 2 or 3");
}

// Trapezoid rule in u = ln y on [u0, u1] for an integrand g(y) dy, i.e. sum h y g(y).
// The half-step sum is compared with the full sum to estimate the error.
template <typename F>
auto log_trapezoid(F&& g, double u0, double u1, double h, double* rel_err) {
  using T = decltype(g(1.0));
  const int n = static_cast<int>(std::ceil((u1 - u0) / h));
  h = (u1 - u0) / n;
  T fine{}, coarse{};
  for (int i = 0; i <= n; ++i) {
    const double y = std::exp(u0 + i * h);
    const T v = g(y) * y;
    const double wt = (i == 0 || i == n) ? 0.5 : 1.0;
    fine += wt * v;
    if (i % 2 == 0) coarse += ((i == 0 || i == n) ? 0.5 : 1.0) * v;
  }
  fine *= h;
  coarse *= 2.0 * h;
  if (rel_err) *rel_err = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
  return fine;
}

// spectral density of the Stieltjes representation of 1/(k^{2s} + lambda) in k = y
double stieltjes_density(double s, double lambda, double y) {
  const double y2s = std::pow(y, 2.0 * s);
  return y2s * std::sin(pi * s) / (lambda * lambda + 2.0 * lambda * y2s * std::cos(pi * s) + y2s * y2s);
}

// strip half-width of analyticity of the density in ln y
double density_strip(double s) { return std::min(pi * (1.0 - s) / (2.0 * s), 0.5 * pi); }

}  // namespace

double resolvent_kernel_at(double s, double lambda, int N, double r) {
  check_params(s, lambda, N);
  if (!(r > 0.0)) throw std::invalid_argument("resolvent_kernel_at: r must be positive");
  const double h = std::min(0.1, 0.15 * density_strip(s));
  const double yscale = std::min(1.0 / r, std::pow(lambda, 0.5 / s));
  const double u0 = std::log(yscale) - 45.0;
  const double u1 = std::log(60.0 / r);
  double err = 0.0;
  double val = 0.0;
  switch (N) {
    case 1:
      val = log_trapezoid([&](double y) { return stieltjes_density(s, lambda, y) * std::exp(-y * r); }, u0, u1, h, &err) / pi;
      break;
    case 2:
      val = log_trapezoid(
                [&](double y) { return y * stieltjes_density(s, lambda, y) * special::bessel_k(0.0, y * r); }, u0, u1,
                h, &err) /
            (pi * pi);
      break;
    default:
      val = log_trapezoid([&](double y) { return y * stieltjes_density(s, lambda, y) * std::exp(-y * r); }, u0, u1, h,
                          &err) /
            (2.0 * pi * pi * r);
  }
  if (!(err < 1e-6) || !std::isfinite(val)) {
    std::ostringstream os;
    os << "kernel quadrature not converged at r = " << r << " (estimate " << err << ")";
    throw SolverError(ErrorKind::quadrature_failure, os.str());
  }
  return val;
}

namespace {

// mass of G inside the ball of radius R, integrating the Yukawa ball mass against the density
double resolvent_ball_mass(double s, double lambda, int N, double R) {
  const double h = std::min(0.1, 0.15 * density_strip(s));
  const double yscale = std::min(1.0 / R, std::pow(lambda, 0.5 / s));
  const double u0 = std::log(yscale) - 45.0;
  const double u1 = std::log(std::pow(lambda, 0.5 / s)) + 45.0 / std::min(2.0 * s, 1.0);
  auto inside = [N](double z) {
    // fraction of the unit-mass Yukawa kernel (y = 1) inside radius z
    switch (N) {
      case 1: return -std::expm1(-z);
      case 2: return z > 700.0 ? 1.0 : 1.0 - z * special::bessel_k(1.0, z);
      default: return 1.0 - std::exp(-z) * (1.0 + z);
    }
  };
  double err = 0.0;
  const double m = log_trapezoid(
      [&](double y) { return stieltjes_density(s, lambda, y) / y * inside(y * R); }, u0, u1, h, &err);
  if (!(err < 1e-6)) throw SolverError(ErrorKind::quadrature_failure, "ball-mass quadrature not converged");
  return 2.0 / pi * m;
}

}  // namespace

std::vector<double> log_radii(double r0, double r1, int per_decade) {
  if (!(r0 > 0.0 && r1 > r0) || per_decade < 1) throw std::invalid_argument("log_radii: bad range");
  const int n = static_cast<int>(std::round(std::log10(r1 / r0) * per_decade));
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = r0 * std::pow(r1 / r0, double(i) / n);
  return out;
}

TailFit kernel_tail_fit(const KernelProfile& p) {
  if (p.radii.size() < 3) throw SolverError(ErrorKind::no_plateau, "too few radii");
  const double rmax = p.radii.back();
  const double ex = p.N + 2.0 * p.s;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> xs, vs;
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    if (p.radii[i] < 0.1 * rmax * (1.0 - 1e-12)) continue;
    const double v = std::pow(p.radii[i], ex) * p.values[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    xs.push_back(std::pow(p.radii[i], -2.0 * p.s));
    vs.push_back(v);
  }
  if (xs.size() < 3) throw SolverError(ErrorKind::no_plateau, "last decade holds fewer than three radii");
  // least squares v = a + b x
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    b[i] = vs[i];
  }
  const Eigen::Vector2d ab = A.colPivHouseholderQr().solve(b);
  TailFit tf;
  tf.C_fit = ab[0];
  tf.correction = ab[1];
  tf.residual = (hi - lo) / std::abs(tf.C_fit);
  if (!(tf.residual <= 0.05))
    throw SolverError(ErrorKind::no_plateau, "relative variation " + std::to_string(tf.residual) + " over the last decade");
  return tf;
}

namespace {

// |S^{N-1}| int_R^inf (C r^{-N-2s} + b r^{-N-4s}) r^{N-1} dr
double tail_mass(int N, double s, double R, const TailFit& tf) {
  return special::sphere_area(N) *
         (tf.C_fit * std::pow(R, -2.0 * s) / (2.0 * s) + tf.correction * std::pow(R, -4.0 * s) / (4.0 * s));
}

}  // namespace

KernelProfile resolvent_kernel(double s, double lambda, int N, std::vector<double> radii) {
  check_params(s, lambda, N);
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("resolvent_kernel: radii must be positive and ascending");
  KernelProfile p;
  p.s = s;
  p.lambda = lambda;
  p.N = N;
  p.radii = std::move(radii);
  p.values.reserve(p.radii.size());
  for (double r : p.radii) p.values.push_back(resolvent_kernel_at(s, lambda, N, r));
  const TailFit tf = kernel_tail_fit(p);
  p.tail_constant = tf.C_fit;
  p.tail_residual = tf.residual;
  p.tail_correction = tf.correction;
  const double rmax = p.radii.back();
  p.l1_norm = resolvent_ball_mass(s, lambda, N, rmax) + tail_mass(N, s, rmax, tf);
  return p;
}

// ---------------------------------------------------------------------------
// heat kernel

namespace {

// int_0^inf f(k) e^{-k^{2s}} dk evaluated on the ray k = y e^{i theta}, where
// kind 0: f = k^n e^{ikx}; kind 1: f = (e^{ikx} - 1)/k; kind 2: f = (e^{ikx}(1 - ikx) - 1)/k
cplx ray_integral(double s, double x, int n, int kind) {
  const double theta = 0.5 * std::min(pi, pi / (4.0 * s));
  const double h = 0.1 * theta;
  const cplx rot = std::polar(1.0, theta);
  const cplx rot2s = std::polar(1.0, 2.0 * s * theta);
  const double decay_x = x * std::sin(theta);
  const double decay_k = std::cos(2.0 * s * theta);
  double yhi = std::pow(45.0 / decay_k, 0.5 / s);
  if (kind == 0 && decay_x > 0.0) yhi = std::min(yhi, 45.0 / decay_x);
  const double ylo = std::min(yhi, 1.0) * 1e-18;
  auto g = [&](double y) -> cplx {
    const cplx k = y * rot;
    const cplx damp = std::exp(-std::pow(y, 2.0 * s) * rot2s);
    const cplx ikx = cplx(0.0, 1.0) * k * x;
    cplx f;
    if (kind == 0) {
      f = std::pow(k, n) * std::exp(ikx);
    } else if (kind == 1) {
      f = (std::abs(ikx) < 1e-8 ? ikx * (1.0 + 0.5 * ikx) : std::exp(ikx) - 1.0) / k;
    } else {
      f = (std::abs(ikx) < 1e-4 ? 0.5 * (-ikx * ikx) * (1.0 + (2.0 / 3.0) * ikx)
                                : std::exp(ikx) * (1.0 - ikx) - 1.0) /
          k;
    }
    return f * damp * rot;
  };
  double err = 0.0;
  const cplx v = log_trapezoid(g, std::log(ylo), std::log(yhi), h, &err);
  if (!(err < 1e-5)) throw SolverError(ErrorKind::quadrature_failure, "heat-kernel ray quadrature at x = " + std::to_string(x));
  return v;
}

// f(x, R - x): the second argument is accurate near the right end R = edges.back()
template <typename F>
double tanh_sinh_panels(F&& f, const std::vector<double>& edges) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double R = edges.back();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const bool last = i + 2 == edges.size();
    auto g = [&](double x, double xc) { return f(x, (last && xc > 0.0) ? xc : R - x); };
    acc += ts.integrate(g, edges[i], edges[i + 1], 1e-12);
  }
  return acc;
}

// panels [0, min(1,R)], then geometric up to R, for integrands singular at R
std::vector<double> panels_to(double R) {
  std::vector<double> e{0.0};
  double a = std::min(1.0, 0.5 * R);
  while (a < R) {
    e.push_back(a);
    a *= 4.0;
  }
  if (e.back() < 0.5 * R) e.push_back(0.5 * R);
  e.push_back(R);
  return e;
}

double heat_unit(double s, int N, double rho) {
  switch (N) {
    case 1:
      return ray_integral(s, rho, 0, 0).real() / pi;
    case 3:
      if (rho < 1e-6) return std::tgamma(1.5 / s) / (2.0 * s) / (2.0 * pi * pi);
      return ray_integral(s, rho, 1, 0).imag() / (2.0 * pi * pi * rho);
    default: {
      if (rho == 0.0) return std::tgamma(1.0 / s) / (2.0 * s) / (2.0 * pi);
      // angular average of the 1-D transform of k e^{-k^{2s}}
      auto f = [&](double x, double gap) {
        const double d = gap * (rho + x);
        if (d <= 0.0) return 0.0;
        return ray_integral(s, x, 1, 0).real() / std::sqrt(d);
      };
      return tanh_sinh_panels(f, panels_to(rho)) / (pi * pi);
    }
  }
}

// mass of the unit-time kernel inside radius R
double heat_ball_mass_unit(double s, int N, double R) {
  switch (N) {
    case 1:
      return 2.0 / pi * ray_integral(s, R, 0, 1).imag();
    case 3:
      return 2.0 / pi * ray_integral(s, R, 0, 2).imag();
    default: {
      auto f = [&](double x, double gap) {
        const double d = gap * (R + x);
        if (d <= 0.0 || x <= 0.0) return 0.0;
        return x / std::sqrt(d) * ray_integral(s, x, 0, 0).imag();
      };
      return 2.0 / pi * tanh_sinh_panels(f, panels_to(R));
    }
  }
}

}  // namespace

double heat_kernel(double s, double t, int N, double r) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("heat_kernel: s must lie in (0, 1]");
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be positive");
  if (N < 1 || N > 3) throw std::invalid_argument("heat_kernel: N must be 1, 2 or 3");
  const double sc = std::pow(t, 0.5 / s);
  return std::pow(sc, -N) * heat_unit(s, N, r / sc);
}

double heat_kernel_mass(double s, double t, int N) {
  (void)t;  // the mass is scale invariant; computed at unit time
  const double rmax = 1e4;
  KernelProfile tail;
  tail.s = s;
  tail.N = N;
  tail.radii = log_radii(rmax / 10.0, rmax, 6);
  for (double r : tail.radii) tail.values.push_back(heat_unit(s, N, r));
  double outside = 0.0;
  if (s < 1.0) outside = tail_mass(N, s, rmax, kernel_tail_fit(tail));
  return heat_ball_mass_unit(s, N, rmax) + outside;
}

HeatBoundReport heat_kernel_bound_check(double s, double t, int N, const std::vector<double>& radii) {
  HeatBoundReport rep;
  rep.s = s;
  rep.t = t;
  rep.N = N;
  rep.radii = radii;
  rep.upper_constant = 0.0;
  rep.lower_constant = std::numeric_limits<double>::infinity();
  const double tpow = std::pow(t, -N / (2.0 * s));
  for (double r : radii) {
    const double p = heat_kernel(s, t, N, r);
    rep.values.push_back(p);
    const double env = std::min(tpow, std::pow(r, -N));
    rep.upper_constant = std::max(rep.upper_constant, p / env);
    rep.lower_constant = std::min(rep.lower_constant, p / env);
  }
  return rep;
}

}  // namespace fraclap
