#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclap/continuation.hpp"
#include "fraclap/linearized.hpp"

using namespace fraclap;

TEST_CASE("scaling identity L_+ (2s/alpha Q + r Q') = -2s Q at s = 1") {
  for (int N = 1; N <= 3; ++N) {
    auto g = make_grid(SectorIndex{N, 0}, 30.0, 512);
    const GroundState gs = solve_ground_state(ProblemParams{N, 1.0, 1.0}, g);
    CHECK(scaling_identity_residual(gs) < 1e-8);
  }
}

TEST_CASE("scaling identity residual shrinks with R for fractional s") {
  double prev = 1.0;
  for (double R : {50.0, 100.0, 200.0}) {
    auto g = make_grid(SectorIndex{1, 0}, R, static_cast<int>(5 * R));
    const GroundState gs = solve_ground_state(ProblemParams{1, 0.5, 1.0}, g);
    const double r = scaling_identity_residual(gs);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("tangent solve") {
  auto g = make_grid(SectorIndex{2, 0}, 40.0, 512);
  const GroundState gs = solve_ground_state(ProblemParams{2, 0.8, 1.0}, g);
  const TangentResult t = tangent(gs);
  CHECK(t.residual < 1e-9);
  CHECK(t.morse_index == 1);
  CHECK(t.min_abs_eig > zero_tolerance(*g, 0.8));
  // against a centered difference of two solves
  const double h = 1e-3;
  const GroundState a = newton_solve(ProblemParams{2, 0.8 + h, 1.0}, gs.Q);
  const GroundState b = newton_solve(ProblemParams{2, 0.8 - h, 1.0}, gs.Q);
  const Eigen::VectorXd fd = (a.Q.values() - b.Q.values()) / (2 * h);
  CHECK((fd - t.dQds.values()).norm() < 1e-4 * t.dQds.values().norm());
}

TEST_CASE("short branch: mass derivative identity and Morse index") {
  auto g = make_grid(SectorIndex{1, 0}, 100.0, 512);
  Branch b = continue_branch(1, 1.0, 1.0, 0.8, 0.02, g);
  REQUIRE(b.points.size() == 11);
  CHECK(b.points.back().s == doctest::Approx(0.8));
  for (const auto& p : b.points) {
    CHECK(p.morse_index == 1);
    CHECK(p.gs.converged);
    CHECK(is_positive_profile(p.gs.Q));
  }
  CHECK(mass_derivative_check(b) < 1e-3);
  for (std::size_t i = 1; i + 1 < b.points.size(); ++i) CHECK(b.points[i].tangent_fd_gap < 1e-2);
  CHECK(b.M_min <= b.M_max);
  CHECK(b.last_good_s == doctest::Approx(0.8));
}

TEST_CASE("continuation validates its arguments") {
  auto g = make_grid(SectorIndex{3, 0}, 20.0, 64);
  // alpha = 1.5 exceeds alpha_* = 1 at s = 0.5 in three dimensions
  CHECK_THROWS(continue_branch(3, 1.5, 1.0, 0.5, 0.05, g));
}

TEST_CASE("uniqueness probe from distinct starts") {
  auto g = make_grid(SectorIndex{1, 0}, 60.0, 512);
  const ProblemParams p{1, 0.7, 1.0};
  const UniquenessResult u = uniqueness_probe(p, g, 4);
  CHECK(u.accepted == 4);
  CHECK(u.rejected.empty());
  CHECK(u.max_distance < 1e-8);
}

TEST_CASE("positivity test") {
  auto g = make_grid(SectorIndex{1, 0}, 10.0, 64);
  CHECK(is_positive_profile(gaussian_profile(g, 1.0, 1.0)));
  const RadialField f = RadialField::from_function(g, [](double r) { return 1.0 - r; });
  CHECK_FALSE(is_positive_profile(f));
}
