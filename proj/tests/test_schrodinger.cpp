#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fraclap/errors.hpp"
#include "fraclap/schrodinger.hpp"

using namespace fraclap;
constexpr double pi = std::numbers::pi;

TEST_CASE("potentials") {
  const PotentialSpec W = PotentialSpec::gaussian(3.0, 2.0);
  CHECK(W(0.0) == doctest::Approx(-3.0));
  CHECK(W(2.0) == doctest::Approx(-3.0 / std::exp(1.0)));
  CHECK(W.monotone_nondecreasing());
  const PotentialSpec S = PotentialSpec::shifted(W, -0.5);
  CHECK(S(1.0) == doctest::Approx(W(1.0) + 0.5));
  CHECK(S.monotone_nondecreasing());
  auto g = make_grid(SectorIndex{2, 0}, 10.0, 32);
  const PotentialSpec bump = PotentialSpec::sampled(RadialField::from_function(g, [](double r) { return std::sin(r); }));
  CHECK_FALSE(bump.monotone_nondecreasing());
  CHECK((bump.at_nodes(*g) - g->nodes().array().sin().matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("trial pair is orthonormal") {
  for (int N = 1; N <= 3; ++N) {
    auto g = make_grid(SectorIndex{N, 0}, 15.0, 256);
    CHECK((trial_overlap(*g) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("trial matrices: closed form at s = 1") {
  for (int N = 1; N <= 3; ++N) {
    const TrialMatrices m = trial_matrices(1.0, N);
    // half the oscillator energies N and N + 4
    CHECK(m.T(0, 0) == doctest::Approx(0.5 * N).epsilon(1e-14));
    CHECK(m.T(1, 1) == doctest::Approx(0.5 * (N + 4)).epsilon(1e-14));
    CHECK(m.V(0, 0) == doctest::Approx(std::pow(2.0, -0.5 * N)).epsilon(1e-14));
    CHECK(m.T(0, 1) == doctest::Approx(m.T(1, 0)));
  }
}

TEST_CASE("trial matrices agree with Fourier-side quadrature") {
  // both trial functions are Fourier eigenfunctions (eigenvalues +1, -1), so
  // t_jk = -+ int |xi|^{2s} psi_j psi_k over R^N
  using boost::math::quadrature::exp_sinh;
  exp_sinh<double> q;
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.3, 0.5, 0.8}) {
      const TrialMatrices m = trial_matrices(s, N);
      const double area = N == 1 ? 2.0 : (N == 2 ? 2 * pi : 4 * pi);
      auto moment = [&](auto f) {
        return area * q.integrate([&](double r) { return r > 40 ? 0.0 : f(r) * std::pow(r, 2 * s + N - 1); });
      };
      CHECK(moment([&](double r) { return trial_psi1(N, r) * trial_psi1(N, r); }) == doctest::Approx(m.T(0, 0)).epsilon(1e-10));
      CHECK(-moment([&](double r) { return trial_psi1(N, r) * trial_psi2(N, r); }) == doctest::Approx(m.T(0, 1)).epsilon(1e-10));
      CHECK(moment([&](double r) { return trial_psi2(N, r) * trial_psi2(N, r); }) == doctest::Approx(m.T(1, 1)).epsilon(1e-10));
      const double v12 = area * q.integrate([&](double r) {
        return r > 40 ? 0.0 : trial_psi1(N, r) * trial_psi2(N, r) * std::exp(-r * r) * std::pow(r, N - 1);
      });
      CHECK(v12 == doctest::Approx(m.V(0, 1)).epsilon(1e-10));
    }
}

TEST_CASE("ball forms approach the trial matrices as R grows") {
  const int N = 2;
  const double s = 0.5;
  const TrialMatrices m = trial_matrices(s, N);
  double prev = 1.0;
  for (double R : {10.0, 20.0, 40.0}) {
    auto g = make_grid(SectorIndex{N, 0}, R, static_cast<int>(25 * R));
    const RadialField p1 = RadialField::from_function(g, [](double r) { return trial_psi1(N, r); });
    const double err = std::abs(quadratic_form(p1, p1, [s](double mu) { return std::pow(mu, s); }) - m.T(0, 0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("coupling above the trial bound binds two states") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.4, 1.0}) {
      const double b = trial_coupling_bound(s, N);
      auto g = make_grid(SectorIndex{N, 0}, 30.0, 384);
      const RadialSpectrum sp = radial_spectrum(s, PotentialSpec::gaussian(1.02 * b), g, 2);
      CHECK(sp.spectrum.eigenvalues[1] < 0.0);
      CHECK(sp.min_gap > 0.0);
    }
}

TEST_CASE("bisected threshold lies below the trial bound") {
  const CouplingResult c = find_two_state_coupling(0.5, 1);
  CHECK(c.g_star < c.matrix_bound);
  CHECK(c.g_star > 1.0);
  CHECK(c.E2 < 0.0);
  CouplingOptions tight;
  tight.g_max = 2.0;
  CHECK_THROWS_AS(find_two_state_coupling(0.5, 1, tight), SolverError);
}

TEST_CASE("homotopy legs join continuously") {
  auto g = make_grid(SectorIndex{2, 0}, 20.0, 128);
  const PotentialSpec V = PotentialSpec::gaussian(4.0, 2.0), W = PotentialSpec::gaussian(15.0);
  const double s0 = 0.5;
  CHECK((homotopy_operator(g, s0, V, W, 1, 1.0).matrix() - homotopy_operator(g, s0, V, W, 2, 0.0).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((homotopy_operator(g, s0, V, W, 2, 1.0).matrix() - homotopy_operator(g, s0, V, W, 3, 0.0).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(homotopy_leg(0.0) == std::pair<int, double>{1, 0.0});
  CHECK(homotopy_leg(0.5).first == 2);
  CHECK(homotopy_leg(0.5).second == doctest::Approx(0.5));
  CHECK(homotopy_leg(1.0) == std::pair<int, double>{3, 1.0});
  CHECK_THROWS(homotopy_leg(1.5));
}

TEST_CASE("short homotopy run keeps one node in psi2") {
  const int N = 1;
  const double s0 = 0.5;
  auto g = make_grid(SectorIndex{N, 0}, 30.0, 256);
  double gw = 0.0;
  for (int k = 0; k <= 10; ++k) gw = std::max(gw, trial_coupling_bound(s0 + (1 - s0) * k / 10.0, N));
  const PotentialSpec W = PotentialSpec::gaussian(1.25 * gw);
  const PotentialSpec V = PotentialSpec::gaussian(1.25 * trial_coupling_bound(s0, N) / 2.0, 2.0);
  const auto run = homotopy_run(s0, V, W, g, HomotopyOptions{8});
  REQUIRE(run.size() == 25);
  for (const auto& st : run) {
    CHECK(st.E1 < st.E2);
    CHECK(st.E2 < 0.0);
    CHECK(st.sign_changes == 1);
    CHECK(st.overlap > 0.9);
  }
  CHECK(run.back().s_kappa == doctest::Approx(1.0));
  CHECK(max_eigenvalue_jump(run) > 0.0);
}

TEST_CASE("eigenfunction tails") {
  SUBCASE("algebraic tail carries the sign opposite to the potential moment") {
    auto g = make_grid(SectorIndex{1, 0}, 60.0, 512);
    const PotentialSpec W = PotentialSpec::gaussian(1.25 * trial_coupling_bound(0.75, 1));
    const RadialSpectrum sp = radial_spectrum(0.75, W, g, 2);
    for (int k = 0; k < 2; ++k) {
      const EigenTail t = eigen_tail_fit(sp.spectrum.eigenfields[k], 0.75, sp.spectrum.eigenvalues[k], W);
      CHECK(t.sign_opposite);
      CHECK(t.exponent_residual < 0.05);
    }
  }
  SUBCASE("exponential tail at s = 1") {
    auto g = make_grid(SectorIndex{2, 0}, 30.0, 512);
    const PotentialSpec W = PotentialSpec::gaussian(1.25 * trial_coupling_bound(1.0, 2));
    const RadialSpectrum sp = radial_spectrum(1.0, W, g, 2);
    const EigenTail t = eigen_tail_fit(sp.spectrum.eigenfields[1], 1.0, sp.spectrum.eigenvalues[1], W);
    CHECK(t.exponent_residual < 1e-3);
  }
}

TEST_CASE("Kato form inequality") {
  auto g = make_grid(SectorIndex{3, 0}, 20.0, 256);
  const RadialField f = RadialField::from_function(g, [](double r) { return (1 - r * r) * std::exp(-r * r); });
  for (double s : {0.3, 0.7, 1.0}) {
    const KatoForms k = kato_forms(f, s);
    CHECK(k.abs_form <= k.form);
  }
  const RadialField pos = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  const KatoForms k = kato_forms(pos, 0.5);
  CHECK(k.abs_form == doctest::Approx(k.form).epsilon(1e-12));
}
