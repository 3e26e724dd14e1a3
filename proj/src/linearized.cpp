#include "fraclap/linearized.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/IterativeSolvers>

#include "fraclap/errors.hpp"
#include "fraclap/ground_state.hpp"

namespace fraclap {
namespace detail {
class WeightedOperator;
}
}  // namespace fraclap

namespace Eigen::internal {
template <>
struct traits<fraclap::detail::WeightedOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace fraclap::detail {

// matrix-free wrapper so Eigen's GMRES can drive SectorOperator
class WeightedOperator : public Eigen::EigenBase<WeightedOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit WeightedOperator(const SectorOperator* op = nullptr) : op_(op) {}
  Eigen::Index rows() const { return op_->size(); }
  Eigen::Index cols() const { return op_->size(); }

  template <typename Rhs>
  Eigen::Product<WeightedOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<WeightedOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }
  const SectorOperator* op() const { return op_; }

 private:
  const SectorOperator* op_;
};

class KineticPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  KineticPreconditioner() = default;
  template <typename MatType>
  KineticPreconditioner& analyzePattern(const MatType&) { return *this; }
  template <typename MatType>
  KineticPreconditioner& factorize(const MatType& m) { op_ = m.op(); return *this; }
  template <typename MatType>
  KineticPreconditioner& compute(const MatType& m) { op_ = m.op(); return *this; }
  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const { return op_->precondition_weighted(b); }
  Eigen::ComputationInfo info() { return Eigen::Success; }

 private:
  const SectorOperator* op_ = nullptr;
};

}  // namespace fraclap::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<fraclap::detail::WeightedOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<fraclap::detail::WeightedOperator, Rhs,
                                generic_product_impl<fraclap::detail::WeightedOperator, Rhs>> {
  using Scalar = typename Product<fraclap::detail::WeightedOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const fraclap::detail::WeightedOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.op()->apply_weighted(rhs);
  }
};
}  // namespace Eigen::internal

namespace fraclap {

SectorOperator::SectorOperator(GridPtr grid, Eigen::VectorXd symbol, Eigen::VectorXd potential)
    : grid_(std::move(grid)), symbol_(std::move(symbol)), potential_(std::move(potential)) {
  if (symbol_.size() != grid_->size() || potential_.size() != grid_->size())
    throw std::invalid_argument("SectorOperator: size mismatch");
}

Eigen::VectorXd SectorOperator::apply_weighted(const Eigen::VectorXd& y) const {
  const auto& U = grid_->transform();
  Eigen::VectorXd c = U * y;
  c.array() *= symbol_.array();
  Eigen::VectorXd out = U * c;
  out.array() += potential_.array() * y.array();
  return out;
}

Eigen::VectorXd SectorOperator::apply(const Eigen::VectorXd& values) const {
  const auto& sw = grid_->sqrt_weights();
  return apply_weighted(values.cwiseProduct(sw)).cwiseQuotient(sw);
}

Eigen::VectorXd SectorOperator::precondition_weighted(const Eigen::VectorXd& y) const {
  const auto& U = grid_->transform();
  Eigen::VectorXd c = U * y;
  c.array() /= symbol_.array();
  return U * c;
}

const Eigen::MatrixXd& SectorOperator::matrix() const {
  std::call_once(matrix_once_, [this] {
    const auto& U = grid_->transform();
    matrix_ = U * symbol_.asDiagonal() * U;
    matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();
    matrix_.diagonal() += potential_;
  });
  return matrix_;
}

Eigen::VectorXd SectorOperator::solve(const Eigen::VectorXd& rhs, double* rel_residual) const {
  const auto& sw = grid_->sqrt_weights();
  const Eigen::VectorXd b = rhs.cwiseProduct(sw);
  Eigen::VectorXd y;
  if (size() <= dense_limit) {
    std::call_once(lu_once_, [this] {
      lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(matrix());
      rcond_ = lu_->rcond();
    });
    if (!(rcond_ > 1e-14))
      throw SolverError(ErrorKind::newton_singular, "reciprocal condition " + std::to_string(rcond_));
    y = lu_->solve(b);
  } else {
    if ((symbol_.array() <= 0.0).any())
      throw std::invalid_argument("SectorOperator::solve: iterative path needs a positive symbol");
    detail::WeightedOperator A(this);
    Eigen::GMRES<detail::WeightedOperator, detail::KineticPreconditioner> gmres;
    gmres.set_restart(200);
    gmres.setMaxIterations(2000);
    gmres.setTolerance(1e-14);
    gmres.compute(A);
    y = gmres.solve(b);
    if (gmres.info() != Eigen::Success && gmres.error() > 1e-10)
      throw SolverError(ErrorKind::newton_singular,
                        "GMRES stalled at relative residual " + std::to_string(gmres.error()));
  }
  if (rel_residual) *rel_residual = (apply_weighted(y) - b).norm() / std::max(b.norm(), 1e-300);
  return y.cwiseQuotient(sw);
}

SectorOperator free_operator(GridPtr grid, double s, double shift) {
  Eigen::VectorXd sym = grid->eigenvalues().array().pow(s) + shift;
  Eigen::VectorXd pot = Eigen::VectorXd::Zero(grid->size());
  return SectorOperator(std::move(grid), std::move(sym), std::move(pot));
}

SectorOperator lplus_radial(const RadialField& Q, double s, double alpha) {
  const auto& grid = Q.grid();
  Eigen::VectorXd sym = grid->eigenvalues().array().pow(s) + 1.0;
  Eigen::VectorXd pot = -(alpha + 1.0) * Q.values().array().abs().pow(alpha);
  return SectorOperator(grid, std::move(sym), std::move(pot));
}

SectorOperator assemble_lplus(const GroundState& gs, SectorIndex sector) {
  const auto& g0 = gs.Q.grid();
  if (sector.N != g0->sector().N) throw std::invalid_argument("assemble_lplus: dimension mismatch");
  if (sector == g0->sector()) return lplus_radial(gs.Q, gs.params.s, gs.params.alpha);
  GridPtr g = make_grid(sector, g0->radius(), g0->size());
  const auto& r = g->nodes();
  Eigen::VectorXd q = gs.Q.evaluate(std::span<const double>(r.data(), r.size()));
  Eigen::VectorXd sym = g->eigenvalues().array().pow(gs.params.s) + 1.0;
  Eigen::VectorXd pot = -(gs.params.alpha + 1.0) * q.array().abs().pow(gs.params.alpha);
  return SectorOperator(std::move(g), std::move(sym), std::move(pot));
}

double zero_tolerance(const RadialGrid& grid, double s) {
  return 1e-5 * (std::pow(grid.eigenvalues()[0], s) + 1.0);
}

SectorSpectrum sector_spectrum(const SectorOperator& op, int k, double zero_tol) {
  const Eigen::MatrixXd& A = op.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw SolverError(ErrorKind::eigensolver_failure,
                      "symmetric eigensolve failed (matrix norm " + std::to_string(A.norm()) + ")");
  SectorSpectrum out;
  out.sector = op.grid()->sector();
  out.zero_tol = zero_tol;
  const auto& ev = es.eigenvalues();
  out.all_eigenvalues.assign(ev.data(), ev.data() + ev.size());
  for (double e : out.all_eigenvalues) {
    if (e < -zero_tol) ++out.negative_count;
    if (std::abs(e) < zero_tol) out.near_zero.push_back(e);
  }
  k = std::min<int>(k, ev.size());
  const auto& sw = op.grid()->sqrt_weights();
  for (int i = 0; i < k; ++i) {
    out.eigenvalues.push_back(ev[i]);
    Eigen::VectorXd y = es.eigenvectors().col(i);
    // sign convention: positive at the innermost significant node
    int first = 0;
    const double ymax = y.cwiseAbs().maxCoeff();
    while (first < y.size() - 1 && std::abs(y[first]) < 1e-3 * ymax) ++first;
    if (y[first] < 0) y = -y;
    out.eigenfields.push_back(RadialField::from_values(op.grid(), y.cwiseQuotient(sw)));
  }
  return out;
}

NondegeneracyReport nondegeneracy_report(const GroundState& gs, int ell_max) {
  if (ell_max < 2 && gs.params.N > 1) throw std::invalid_argument("nondegeneracy_report: ell_max must be >= 2");
  NondegeneracyReport rep;
  const double s = gs.params.s;
  rep.zero_tol = zero_tolerance(*gs.Q.grid(), s);
  const int top = gs.params.N == 1 ? 1 : ell_max;
  double prev = -std::numeric_limits<double>::infinity();
  rep.ordered = true;
  bool all = true;
  for (int ell = 0; ell <= top; ++ell) {
    SectorIndex sec{gs.params.N, ell};
    SectorOperator op = assemble_lplus(gs, sec);
    SectorSpectrum sp = sector_spectrum(op, 2, rep.zero_tol);
    SectorReport sr;
    sr.sector = sec;
    sr.lowest = sp.eigenvalues[0];
    sr.second = sp.eigenvalues[1];
    sr.negative_count = sp.negative_count;
    sr.zero_modes = static_cast<int>(sp.near_zero.size());
    sr.distance_to_zero = std::numeric_limits<double>::infinity();
    for (double e : sp.all_eigenvalues) sr.distance_to_zero = std::min(sr.distance_to_zero, std::abs(e));
    if (ell == 0) {
      sr.pass = sr.negative_count == 1 && sr.zero_modes == 0;
    } else if (ell == 1) {
      const auto& g = op.grid();
      const auto& r = g->nodes();
      Eigen::VectorXd dq = gs.Q.derivative(std::span<const double>(r.data(), r.size()));
      const RadialField qp = RadialField::from_values(g, dq);
      const RadialField& v = sp.eigenfields[0];
      sr.qprime_cosine = std::abs(inner(qp, v)) / (l2_norm(qp) * l2_norm(v));
      sr.pass = sr.negative_count == 0 && sr.zero_modes == 1 && sr.qprime_cosine > 1.0 - 1e-6;
    } else {
      sr.pass = sr.lowest > rep.zero_tol;
    }
    if (!(sr.lowest > prev)) rep.ordered = false;
    prev = sr.lowest;
    all = all && sr.pass;
    rep.sectors.push_back(sr);
  }
  rep.pass = all && rep.ordered;
  return rep;
}

int sign_changes(const Eigen::VectorXd& values, double threshold_rel) {
  const double cut = threshold_rel * values.cwiseAbs().maxCoeff();
  int count = 0, last = 0;
  for (double v : values) {
    if (std::abs(v) <= cut) continue;
    const int sg = v > 0 ? 1 : -1;
    if (last != 0 && sg != last) ++count;
    last = sg;
  }
  return count;
}

int sign_changes(const RadialField& f, double threshold_rel) { return sign_changes(f.values(), threshold_rel); }

}  // namespace fraclap
