#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclap/ground_state.hpp"

using namespace fraclap;

namespace {

double max_err(const RadialField& Q, double (*exact)(double, double), double a) {
  double e = 0.0;
  for (int q = 0; q < Q.size(); ++q) e = std::max(e, std::abs(Q.values()[q] - exact(Q.grid()->nodes()[q], a)));
  return e;
}

// -Q'' + Q - Q^{alpha+1} = 0 on the line
double sech_profile(double x, double a) {
  return std::pow((a + 2) / 2, 1 / a) * std::pow(1.0 / std::cosh(a * x / 2), 2 / a);
}

double bo(double x, double) { return 2.0 / (1.0 + x * x); }

}  // namespace

TEST_CASE("critical exponent and admissibility") {
  CHECK(ProblemParams::critical_exponent(0.5, 3) == doctest::Approx(1.0));
  CHECK(ProblemParams::critical_exponent(0.7, 2) == doctest::Approx(2.8 / 0.6));
  CHECK(std::isinf(ProblemParams::critical_exponent(0.5, 1)));
  CHECK(std::isinf(ProblemParams::critical_exponent(1.0, 2)));
  CHECK(ProblemParams{3, 0.5, 0.9}.admissible());
  CHECK_FALSE(ProblemParams{3, 0.5, 1.0}.admissible());
  try {
    ProblemParams{3, 0.5, 2.5}.validate();
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("alpha_*") != std::string::npos);
    CHECK(std::string(e.what()).find("= 1") != std::string::npos);
  }
}

TEST_CASE("Benjamin-Ono soliton") {
  auto g = make_grid(SectorIndex{1, 0}, 200.0, 1024);
  const GroundState gs = solve_ground_state(ProblemParams{1, 0.5, 1.0}, g);
  REQUIRE(gs.converged);
  CHECK(max_err(gs.Q, bo, 0) / 2.0 < 1e-3);
  CHECK(gs.Q.value_at_origin() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(equation_residual(gs.Q, gs.params) < 1e-8);
  // r^2 Q -> 2
  REQUIRE(std::isfinite(gs.tail_constant));
  CHECK(gs.tail_constant == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("local cubic and quadratic solitons") {
  auto g = make_grid(SectorIndex{1, 0}, 30.0, 256);
  for (double a : {1.0, 2.0}) {
    const GroundState gs = solve_ground_state(ProblemParams{1, 1.0, a}, g);
    REQUIRE(gs.converged);
    CHECK(max_err(gs.Q, sech_profile, a) < 1e-9);
  }
  const GroundState c = solve_ground_state(ProblemParams{1, 1.0, 2.0}, g);
  CHECK(c.Q.value_at_origin() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("Pohozaev identities with exponential decay") {
  for (int N = 1; N <= 3; ++N) {
    auto g = make_grid(SectorIndex{N, 0}, 30.0, 512);
    const GroundState gs = solve_ground_state(ProblemParams{N, 1.0, 1.0}, g);
    REQUIRE(gs.converged);
    CHECK(gs.pohozaev1_residual < 1e-9);
    CHECK(gs.pohozaev2_residual < 1e-9);
  }
}

TEST_CASE("profiles are positive and radially decreasing") {
  for (int N = 1; N <= 3; ++N)
    for (double s : {0.6, 0.9}) {
      auto g = make_grid(SectorIndex{N, 0}, 40.0, 384);
      const GroundState gs = solve_ground_state(ProblemParams{N, s, 1.0}, g);
      REQUIRE(gs.converged);
      CHECK(gs.Q.values().minCoeff() > 0.0);
      // monotone over the region where Q is resolved
      for (int q = 1; q < g->size() && g->nodes()[q] < 10.0; ++q) CHECK(gs.Q.values()[q] < gs.Q.values()[q - 1]);
    }
}

TEST_CASE("ground state minimizes the Weinstein functional among trial profiles") {
  auto g = make_grid(SectorIndex{2, 0}, 40.0, 384);
  const ProblemParams p{2, 0.7, 1.0};
  const GroundState gs = solve_ground_state(p, g);
  REQUIRE(gs.converged);
  for (double w : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(weinstein_J(gs.Q, p) <= weinstein_J(gaussian_profile(g, 1.0, w), p));
    CHECK(weinstein_J(gs.Q, p) <= weinstein_J(lorentzian_profile(g, 1.0, w), p));
  }
  // J is invariant under amplitude and length scaling
  const RadialField Q2 = gs.Q * 3.0;
  CHECK(weinstein_J(Q2, p) == doctest::Approx(weinstein_J(gs.Q, p)).epsilon(1e-12));
}

TEST_CASE("Newton from a perturbed profile returns to the same state") {
  auto g = make_grid(SectorIndex{1, 0}, 60.0, 512);
  const ProblemParams p{1, 0.8, 1.5};
  const GroundState a = solve_ground_state(p, g);
  const GroundState b = newton_solve(p, a.Q * 1.02);
  REQUIRE(b.converged);
  CHECK((a.Q.values() - b.Q.values()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solver rejects bad input") {
  auto g = make_grid(SectorIndex{3, 0}, 20.0, 64);
  CHECK_THROWS_AS(solve_ground_state(ProblemParams{3, 0.5, 2.5}, g), std::invalid_argument);
  CHECK_THROWS_AS(solve_ground_state(ProblemParams{2, 0.5, 0.5}, g), std::invalid_argument);
  auto g1 = make_grid(SectorIndex{3, 1}, 20.0, 64);
  CHECK_THROWS_AS(solve_ground_state(ProblemParams{3, 0.7, 1.0}, g1), std::invalid_argument);
}
