#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclap/extension.hpp"
#include "fraclap/ground_state.hpp"
#include "fraclap/linearized.hpp"
#include "fraclap/special.hpp"

using namespace fraclap;

namespace {
RadialField smooth_field(GridPtr g) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g->size());
  for (int k = 0; k < 16; ++k) c[k] = std::cos(0.7 * k) / (1.0 + k);
  return RadialField::from_coeffs(g, c);
}
}  // namespace

TEST_CASE("levels are log-uniform and cover the modes") {
  auto g = make_grid(SectorIndex{2, 0}, 20.0, 128);
  for (double s : {0.25, 0.5, 0.75}) {
    const auto t = default_levels(*g, s);
    REQUIRE(t.size() > 10);
    for (std::size_t j = 1; j < t.size(); ++j) CHECK(t[j] > t[j - 1]);
    CHECK(std::sqrt(g->eigenvalues()[0]) * t.back() >= 40.0 * (1 - 1e-12));
    CHECK(std::sqrt(g->eigenvalues()[g->size() - 1]) * t.front() < 1e-3);
  }
}

TEST_CASE("half-harmonic extension of a mode is exp(-sqrt(mu) t)") {
  auto g = make_grid(SectorIndex{1, 0}, 10.0, 64);
  const int k = 5;
  const RadialField m = RadialField::mode(g, k);
  const std::vector<double> t = {0.01, 0.1, 0.5, 2.0};
  const ExtensionField e = extend(m, 0.5, t);
  const double smu = std::sqrt(g->eigenvalues()[k]);
  for (int j = 0; j < 4; ++j) {
    const Eigen::VectorXd expect = m.values() * std::exp(-smu * t[j]);
    CHECK((e.u.col(j) - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((e.u_t.col(j) + smu * expect).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("extension solves the mode equation and matches the trace") {
  auto g = make_grid(SectorIndex{3, 0}, 20.0, 128);
  const RadialField f = smooth_field(g);
  for (double s : {0.25, 0.5, 0.75}) {
    const ExtensionField e = extend(f, s, default_levels(*g, s));
    CHECK(e.collocation_residual < 1e-8);
    CHECK((e.u.col(0) - f.values()).cwiseAbs().maxCoeff() < 1e-6 * f.values().cwiseAbs().maxCoeff());
    // decays away from the boundary
    CHECK(e.u.col(e.u.cols() - 1).cwiseAbs().maxCoeff() < 1e-6 * f.values().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("Dirichlet-to-Neumann map recovers (-Delta)^s") {
  auto g = make_grid(SectorIndex{2, 0}, 20.0, 128);
  const RadialField f = smooth_field(g);
  for (double s : {0.2, 0.5, 0.8}) {
    const DirichletNeumann dn = dirichlet_neumann_check(f, s);
    CHECK(dn.residual < 1e-6);
    CHECK(recovered_dn_constant(s, 3.0) == doctest::Approx(special::dn_constant(s)).epsilon(1e-8));
  }
}

TEST_CASE("energy identity and minimality") {
  auto g = make_grid(SectorIndex{1, 0}, 20.0, 128);
  const RadialField f = smooth_field(g);
  for (double s : {0.3, 0.6}) {
    const TraceReport t = trace_inequality_check(f, s);
    CHECK(t.ratio == doctest::Approx(1.0).epsilon(1e-8));
    for (double eps : {-0.2, 0.05, 0.4}) {
      const TraceReport b = trace_inequality_check(
          f, s, [](double x) { return x / (1 + x * x); }, [](double x) { return (1 - x * x) / std::pow(1 + x * x, 2); },
          eps);
      CHECK(b.ratio > 1.0);
    }
  }
}

TEST_CASE("monotone quantity for the ground-state eigenproblem") {
  auto g = make_grid(SectorIndex{1, 0}, 60.0, 512);
  const GroundState gs = solve_ground_state(ProblemParams{1, 0.5, 1.0}, g);
  const SectorOperator L = assemble_lplus(gs, SectorIndex{1, 0});
  const SectorSpectrum sp = sector_spectrum(L, 1, zero_tolerance(*g, 0.5));
  const Eigen::VectorXd Vf = 1.0 + L.potential().array() - sp.eigenvalues[0];
  const MonotoneH h = monotone_H(sp.eigenfields[0], RadialField::from_values(g, Vf), 0.5);
  CHECK(h.max_increase <= 1e-6 * h.max_abs);
  CHECK(h.H0 <= h.bound0 + 1e-6);
  CHECK(std::abs(h.H_far) <= 1e-4 * std::abs(h.H0));
  CHECK(h.d_s == doctest::Approx(1.0));
}
