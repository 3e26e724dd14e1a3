#include "fraclap/extension.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclap/errors.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

namespace {

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("extension: s must lie in (0, 1)");
}

// trapezoid weights in ln t for int g(t) dt on the given levels; `stride` picks every stride-th level
std::vector<double> log_weights(const std::vector<double>& t, int stride = 1) {
  std::vector<double> w(t.size(), 0.0);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); i += stride) idx.push_back(i);
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const double lo = m > 0 ? std::log(t[idx[m - 1]]) : std::log(t[idx[m]]);
    const double hi = m + 1 < idx.size() ? std::log(t[idx[m + 1]]) : std::log(t[idx[m]]);
    w[idx[m]] = 0.5 * (hi - lo) * t[idx[m]];
  }
  return w;
}

double ode_residual(double s, double tau) {
  // fourth-order central differences of phi in tau
  const double h = 1e-2 * std::min(tau, 1.0);
  auto phi = [s](double x) { return special::extension_profile(s, x); };
  const double f0 = phi(tau), fp1 = phi(tau + h), fm1 = phi(tau - h), fp2 = phi(tau + 2 * h), fm2 = phi(tau - 2 * h);
  const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
  const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
  const double a = 1.0 - 2.0 * s;
  const double scale = std::abs(d2) + std::abs(a / tau * d1) + std::abs(f0);
  return std::abs(d2 + a / tau * d1 - f0) / scale;
}

}  // namespace

std::vector<double> default_levels(const RadialGrid& grid, double s, double log_step) {
  check_s(s);
  const double smu_max = std::sqrt(grid.eigenvalues()[grid.size() - 1]);
  const double smu_min = std::sqrt(grid.eigenvalues()[0]);
  const double t_lo = std::pow(1e-13, 1.0 / std::min(2.0 * s, 2.0 - 2.0 * s)) / smu_max;
  const double t_hi = 40.0 / smu_min;
  const int n = static_cast<int>(std::ceil(std::log(t_hi / t_lo) / log_step));
  std::vector<double> t(n + 1);
  for (int j = 0; j <= n; ++j) t[j] = t_lo * std::exp(j * std::log(t_hi / t_lo) / n);
  return t;
}

ExtensionField extend(const RadialField& f, double s, std::vector<double> levels) {
  check_s(s);
  for (std::size_t j = 0; j < levels.size(); ++j)
    if (!(levels[j] > 0.0) || (j > 0 && !(levels[j] > levels[j - 1])))
      throw std::invalid_argument("extend: levels must be positive and ascending");
  const auto& g = *f.grid();
  const int M = g.size();
  const int K = static_cast<int>(levels.size());
  ExtensionField e;
  e.base = f;
  e.s = s;
  e.levels = std::move(levels);
  e.coeffs.resize(M, K);
  Eigen::MatrixXd dcoef(M, K), fcoef(M, K);
  const auto& mu = g.eigenvalues();
  const auto& c = f.coeffs();
  double worst = 0.0;
  for (int k = 0; k < M; ++k) {
    const double sm = std::sqrt(mu[k]);
    const double mus = std::pow(mu[k], s);
    for (int j = 0; j < K; ++j) {
      const double tau = sm * e.levels[j];
      e.coeffs(k, j) = c[k] * special::extension_profile(s, tau);
      dcoef(k, j) = c[k] * sm * special::extension_profile_derivative(s, tau);
      fcoef(k, j) = c[k] * mus * special::extension_flux(s, tau);
    }
  }
  // mode ODE residual on a sample of the tau values actually used
  for (int k = 0; k < M; k += std::max(1, M / 16))
    for (int j = 0; j < K; j += std::max(1, K / 16)) {
      const double tau = std::sqrt(mu[k]) * e.levels[j];
      if (tau > 1e-2 && tau < 30.0) worst = std::max(worst, ode_residual(s, tau));
    }
  e.collocation_residual = worst;
  e.u = g.inverse(e.coeffs);
  e.u_t = g.inverse(dcoef);
  e.flux = g.inverse(fcoef);
  const auto& r = g.nodes();
  const Eigen::MatrixXd D = g.synthesis(std::span<const double>(r.data(), r.size()), true);
  e.u_r = D * e.coeffs;
  return e;
}

double mode_flux_limit(double s, double mu) {
  check_s(s);
  const double p = 2.0 - 2.0 * s;
  const double mus = std::pow(mu, s);
  const double tau = 1e-6;
  const double e1 = special::extension_flux(s, tau);
  const double e2 = special::extension_flux(s, 2.0 * tau);
  const double q = std::pow(2.0, p);
  return mus * (q * e1 - e2) / (q - 1.0);
}

double recovered_dn_constant(double s, double mu) { return std::pow(mu, s) / (-mode_flux_limit(s, mu)); }

DirichletNeumann dirichlet_neumann_check(const RadialField& f, double s) {
  check_s(s);
  const auto& g = f.grid();
  const auto& c = f.coeffs();
  const int M = g->size();
  const int top = M - M / 10;
  const double peak = c.cwiseAbs().maxCoeff();
  if (c.tail(M - top).cwiseAbs().maxCoeff() > 1e-8 * peak)
    throw std::invalid_argument("dirichlet_neumann_check: field is not band-limited on this grid");
  const double t0 = 1e-6 / std::sqrt(g->eigenvalues()[M - 1]);
  std::vector<double> levels{t0, 2.0 * t0, 4.0 * t0};
  const ExtensionField e = extend(f, s, levels);
  const double ds = special::dn_constant(s);
  const double p = 2.0 - 2.0 * s;
  const double q = std::pow(2.0, p);
  const Eigen::VectorXd E1 = -ds * e.flux.col(0), E2 = -ds * e.flux.col(1), E3 = -ds * e.flux.col(2);
  const Eigen::VectorXd lim = (q * E1 - E2) / (q - 1.0);
  const auto& w = g->weights();
  auto wnorm = [&w](const Eigen::VectorXd& v) { return std::sqrt((w.array() * v.array().square()).sum()); };
  const double d1 = wnorm(E2 - E1), d2 = wnorm(E3 - E2);
  DirichletNeumann out;
  out.observed_ratio = d1 > 0.0 ? d2 / d1 : q;
  const double floor = 1e-12 * wnorm(lim);
  if (d1 > floor && d2 > floor && (out.observed_ratio > 10.0 * q || out.observed_ratio < q / 10.0))
    throw SolverError(ErrorKind::extrapolation_unstable,
                      "difference ratio " + std::to_string(out.observed_ratio) + " vs expected " + std::to_string(q));
  out.neumann = RadialField::from_values(g, lim);
  const RadialField ref = fractional_laplacian(f, s);
  out.residual = wnorm(lim - ref.values()) / wnorm(ref.values());
  return out;
}

TraceReport trace_inequality_check(const RadialField& f, double s, const std::function<double(double)>& bump,
                                   const std::function<double(double)>& bump_derivative, double eps) {
  check_s(s);
  const auto& g = *f.grid();
  const std::vector<double> t = default_levels(g, s);
  const auto& mu = g.eigenvalues();
  const Eigen::ArrayXd c2 = f.coeffs().array().square();
  const double a = 1.0 - 2.0 * s;
  std::vector<double> integrand(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    // spatial sums at level t_j
    double grad = 0.0, vert = 0.0, cross = 0.0, mass = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      if (c2[k] == 0.0) continue;
      const double sm = std::sqrt(mu[k]);
      const double ph = special::extension_profile(s, sm * t[j]);
      const double dph = sm * special::extension_profile_derivative(s, sm * t[j]);
      grad += mu[k] * c2[k] * ph * ph;
      vert += c2[k] * dph * dph;
      cross += c2[k] * ph * dph;
      mass += c2[k] * ph * ph;
    }
    double val = grad + vert;
    if (bump && eps != 0.0) {
      const double b = 1.0 + eps * bump(t[j]);
      const double db = eps * bump_derivative(t[j]);
      val = b * b * (grad + vert) + 2.0 * b * db * cross + db * db * mass;
    }
    integrand[j] = std::pow(t[j], a) * val;
  }
  auto integrate = [&](int stride) {
    const std::vector<double> w = log_weights(t, stride);
    double acc = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) acc += w[j] * integrand[j];
    return acc;
  };
  TraceReport rep;
  rep.lhs = integrate(1);
  const double coarse = integrate(2);
  rep.quadrature_estimate = std::abs(rep.lhs - coarse) / std::abs(rep.lhs);
  if (!(rep.quadrature_estimate < 1e-6))
    throw SolverError(ErrorKind::quadrature_failure,
                      "t-quadrature changes by " + std::to_string(rep.quadrature_estimate) + " under step doubling");
  const double T = (mu.array().pow(s) * c2).sum();
  rep.rhs = T / special::dn_constant(s);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

MonotoneH monotone_H(const RadialField& u, const RadialField& V, double s, std::vector<double> levels) {
  check_s(s);
  const auto& g = *u.grid();
  if (V.grid() != u.grid()) throw std::invalid_argument("monotone_H: u and V must share a grid");
  if (levels.empty()) levels = default_levels(g, s);
  const ExtensionField e = extend(u, s, levels);
  const std::vector<double> w = log_weights(e.levels);
  const double a = 1.0 - 2.0 * s;
  const double ds = special::dn_constant(s);
  const int M = g.size();
  Eigen::VectorXd wt(e.levels.size());
  for (std::size_t j = 0; j < e.levels.size(); ++j) wt[j] = w[j] * std::pow(e.levels[j], a);
  MonotoneH H;
  H.d_s = ds;
  const Eigen::VectorXd radial = (e.u_r.array().square() - e.u_t.array().square()).matrix() * wt;
  for (int q = 0; q < M; ++q) {
    H.radii.push_back(g.nodes()[q]);
    H.H_values.push_back(0.5 * ds * radial[q] - 0.5 * V.values()[q] * u.values()[q] * u.values()[q]);
  }
  // r = 0: u_r vanishes for radial data
  const double u0 = u.value_at_origin();
  double vert0 = 0.0;
  for (std::size_t j = 0; j < e.levels.size(); ++j) {
    double ut = 0.0;
    for (int k = 0; k < M; ++k) {
      const double sm = std::sqrt(g.eigenvalues()[k]);
      ut += u.coeffs()[k] * g.basis(k, 0.0) * sm * special::extension_profile_derivative(s, sm * e.levels[j]);
    }
    vert0 += wt[j] * ut * ut;
  }
  H.vertical_energy0 = vert0;
  H.bound0 = -0.5 * V.value_at_origin() * u0 * u0;
  H.H0 = -0.5 * ds * vert0 + H.bound0;
  int far = 0;
  for (int q = 0; q < M; ++q)
    if (std::abs(g.nodes()[q] - 0.8 * g.radius()) < std::abs(g.nodes()[far] - 0.8 * g.radius())) far = q;
  H.H_far = H.H_values[far];
  H.max_abs = std::abs(H.H0);
  for (double h : H.H_values) H.max_abs = std::max(H.max_abs, std::abs(h));
  double inc = std::max(0.0, H.H_values[0] - H.H0);
  for (int q = 0; q + 1 < M; ++q) inc = std::max(inc, H.H_values[q + 1] - H.H_values[q]);
  H.max_increase = inc;
  return H;
}

}  // namespace fraclap
