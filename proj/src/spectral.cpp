#include "fraclap/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "fraclap/special.hpp"

namespace fraclap {

void SectorIndex::validate() const {
  if (N < 1) throw std::invalid_argument("sector: N must be >= 1");
  if (ell < 0) throw std::invalid_argument("sector: ell must be >= 0");
  if (N == 1 && ell > 1) throw std::invalid_argument("sector: N = 1 admits ell in {0, 1} only");
}

namespace {

double estimate_defect(const Eigen::MatrixXd& Y) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd x(Y.rows());
    for (auto& v : x) v = nd(rng);
    x.normalize();
    worst = std::max(worst, (Y * (Y * x) - x).norm());
  }
  return worst;
}

}  // namespace

RadialGrid::RadialGrid(SectorIndex sector, double R, int M) : sector_(sector), R_(R), M_(M) {
  sector_.validate();
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("make_grid: R must be positive");
  if (M < 8) throw std::invalid_argument("make_grid: M must be >= 8");

  const double nu = sector_.nu();
  const std::vector<double> z = special::bessel_j_zeros(nu, M + 1);
  const double S = z[M];
  j_ = Eigen::Map<const Eigen::VectorXd>(z.data(), M);

  Eigen::VectorXd J1(M);
  for (int k = 0; k < M; ++k) J1[k] = std::abs(special::bessel_j(nu + 1.0, j_[k]));

  const double area = special::sphere_area(sector_.N);
  r_ = j_ * (R / S);
  mu_ = (j_ / R).array().square();
  w_.resize(M);
  amp_.resize(M);
  for (int q = 0; q < M; ++q) {
    w_[q] = 2.0 * area * R * R * std::pow(r_[q], sector_.N - 2) / (S * S * J1[q] * J1[q]);
    amp_[q] = std::sqrt(2.0 / area) / (R * J1[q]);
  }
  sw_ = w_.array().sqrt();

  U_.resize(M, M);
  for (int k = 0; k < M; ++k)
    for (int q = k; q < M; ++q) {
      const double y = 2.0 * special::bessel_j(nu, j_[q] * j_[k] / S) / (S * J1[q] * J1[k]);
      U_(q, k) = y;
      U_(k, q) = y;
    }

  raw_defect_ = estimate_defect(U_);
  if (raw_defect_ > 1e-11) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M, M);
    for (int it = 0; it < 6; ++it) {
      Eigen::MatrixXd Y2 = U_ * U_;
      U_ = 0.5 * U_ * (3.0 * I - Y2);
      U_ = 0.5 * (U_ + U_.transpose()).eval();
      if (estimate_defect(U_) < 1e-14) break;
    }
  }
}

GridPtr make_grid(SectorIndex sector, double R, int M) {
  return std::make_shared<const RadialGrid>(sector, R, M);
}

Eigen::VectorXd RadialGrid::forward(const Eigen::VectorXd& values) const {
  return U_ * values.cwiseProduct(sw_);
}

Eigen::VectorXd RadialGrid::inverse(const Eigen::VectorXd& coeffs) const {
  return (U_ * coeffs).cwiseQuotient(sw_);
}

Eigen::MatrixXd RadialGrid::forward(const Eigen::MatrixXd& values) const {
  return U_ * (sw_.asDiagonal() * values);
}

Eigen::MatrixXd RadialGrid::inverse(const Eigen::MatrixXd& coeffs) const {
  return sw_.cwiseInverse().asDiagonal() * (U_ * coeffs);
}

double RadialGrid::basis(int k, double r) const {
  const double nu = sector_.nu();
  const double kk = j_[k] / R_;
  if (r <= 0.0) {
    if (sector_.ell != 0) return 0.0;
    return amp_[k] * std::pow(0.5 * kk, nu) / std::tgamma(nu + 1.0);
  }
  return amp_[k] * std::pow(r, -sector_.power()) * special::bessel_j(nu, kk * r);
}

double RadialGrid::basis_derivative(int k, double r) const {
  const double nu = sector_.nu();
  const double p = sector_.power();
  const double kk = j_[k] / R_;
  if (r <= 0.0) {
    if (sector_.ell != 1) return 0.0;
    return amp_[k] * std::pow(0.5 * kk, nu) / std::tgamma(nu + 1.0);
  }
  const double x = kk * r;
  const double jn = special::bessel_j(nu, x);
  const double jn1 = special::bessel_j(nu + 1.0, x);
  return amp_[k] * std::pow(r, -p) * ((nu - p) / r * jn - kk * jn1);
}

Eigen::MatrixXd RadialGrid::synthesis(std::span<const double> radii, bool derivative) const {
  Eigen::MatrixXd B(radii.size(), M_);
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (int k = 0; k < M_; ++k)
      B(i, k) = derivative ? basis_derivative(k, radii[i]) : basis(k, radii[i]);
  return B;
}

// ---------------------------------------------------------------------------

RadialField RadialField::from_values(GridPtr grid, Eigen::VectorXd values) {
  if (!grid) throw std::invalid_argument("RadialField: null grid");
  if (values.size() != grid->size()) throw std::invalid_argument("RadialField: size mismatch");
  if (!values.allFinite()) throw std::invalid_argument("RadialField: non-finite values");
  Eigen::VectorXd c = grid->forward(values);
  return RadialField(std::move(grid), std::move(values), std::move(c));
}

RadialField RadialField::from_coeffs(GridPtr grid, Eigen::VectorXd coeffs) {
  if (!grid) throw std::invalid_argument("RadialField: null grid");
  if (coeffs.size() != grid->size()) throw std::invalid_argument("RadialField: size mismatch");
  if (!coeffs.allFinite()) throw std::invalid_argument("RadialField: non-finite coefficients");
  Eigen::VectorXd v = grid->inverse(coeffs);
  return RadialField(std::move(grid), std::move(v), std::move(coeffs));
}

RadialField RadialField::from_function(GridPtr grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid->size());
  for (int q = 0; q < grid->size(); ++q) v[q] = f(grid->nodes()[q]);
  return from_values(std::move(grid), std::move(v));
}

RadialField RadialField::mode(GridPtr grid, int k) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(grid->size());
  c[k] = 1.0;
  return from_coeffs(std::move(grid), std::move(c));
}

double RadialField::at(double r) const {
  double acc = 0.0;
  for (int k = 0; k < coeffs_.size(); ++k)
    if (coeffs_[k] != 0.0) acc += coeffs_[k] * grid_->basis(k, r);
  return acc;
}

Eigen::VectorXd RadialField::evaluate(std::span<const double> radii) const {
  return grid_->synthesis(radii, false) * coeffs_;
}

Eigen::VectorXd RadialField::derivative(std::span<const double> radii) const {
  return grid_->synthesis(radii, true) * coeffs_;
}

Eigen::VectorXd RadialField::derivative_at_nodes() const {
  const auto& r = grid_->nodes();
  return derivative(std::span<const double>(r.data(), r.size()));
}

RadialField RadialField::operator+(const RadialField& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("RadialField: grids differ");
  return RadialField(grid_, values_ + o.values_, coeffs_ + o.coeffs_);
}

RadialField RadialField::operator-(const RadialField& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("RadialField: grids differ");
  return RadialField(grid_, values_ - o.values_, coeffs_ - o.coeffs_);
}

RadialField RadialField::operator*(double a) const { return RadialField(grid_, values_ * a, coeffs_ * a); }

// ---------------------------------------------------------------------------

RadialField apply_multiplier(const RadialField& f, const Multiplier& m) {
  const auto& mu = f.grid()->eigenvalues();
  Eigen::VectorXd c = f.coeffs();
  for (int k = 0; k < c.size(); ++k) {
    const double mk = m(mu[k]);
    if (!std::isfinite(mk))
      throw std::domain_error("apply_multiplier: non-finite multiplier at mode " + std::to_string(k));
    c[k] *= mk;
  }
  return RadialField::from_coeffs(f.grid(), std::move(c));
}

RadialField fractional_laplacian(const RadialField& f, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("fractional_laplacian: s must lie in (0, 1]");
  return apply_multiplier(f, [s](double mu) { return std::pow(mu, s); });
}

RadialField log_laplacian_s(const RadialField& f, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("log_laplacian_s: s must lie in (0, 1]");
  return apply_multiplier(f, [s](double mu) { return std::pow(mu, s) * std::log(mu); });
}

Norms norms(const RadialField& f, double s, double alpha) {
  const auto& c = f.coeffs();
  const auto& mu = f.grid()->eigenvalues();
  Norms n;
  n.M = c.squaredNorm();
  n.T = (mu.array().pow(s) * c.array().square()).sum();
  n.V = (f.grid()->weights().array() * f.values().array().abs().pow(alpha + 2.0)).sum();
  return n;
}

double inner(const RadialField& f, const RadialField& g) {
  return (f.grid()->weights().array() * f.values().array() * g.values().array()).sum();
}

double l2_norm(const RadialField& f) { return std::sqrt(inner(f, f)); }

double quadratic_form(const RadialField& f, const RadialField& g, const Multiplier& m) {
  const auto& mu = f.grid()->eigenvalues();
  double acc = 0.0;
  for (int k = 0; k < mu.size(); ++k) acc += f.coeffs()[k] * m(mu[k]) * g.coeffs()[k];
  return acc;
}

}  // namespace fraclap
