#include <doctest.h>

#include <cmath>

#include "plankforge/constructions.hpp"
#include "plankforge/error.hpp"
#include "plankforge/plank.hpp"

using namespace plankforge;

namespace {

std::vector<Vector> scaled_basis(std::size_t n) {
  const auto space = SpaceModel::euclidean_real(n);
  std::vector<Vector> xs;
  for (std::size_t k = 1; k <= n; ++k) xs.push_back(static_cast<double>(k) * Vector::basis(space, k));
  return xs;
}

}  // namespace

TEST_CASE("plank membership") {
  const auto space = SpaceModel::euclidean_real(2);
  CHECK_THROWS_AS(Plank::make(2.0 * Vector::basis(space, 1), 1.0), InvalidInput);
  CHECK_THROWS_AS(Plank::make(Vector::basis(space, 1), 0.0), InvalidInput);
  const auto p = Plank::make(Vector::basis(space, 1), 1.0);
  CHECK(plank_contains(p, Vector::from_values(space, {0.5, 9.0})));
  CHECK(plank_contains(p, Vector::from_values(space, {-0.5, 0.0})));
  CHECK_FALSE(plank_contains(p, Vector::from_values(space, {0.5000001, 0.0})));
  CHECK_THROWS_AS(plank_contains(p, Vector::basis(SpaceModel::euclidean_real(3), 1)), SpaceMismatch);

  const auto shifted = Plank::make(Vector::basis(space, 2), 1.0, Vector::from_values(space, {0.0, 3.0}));
  CHECK(plank_contains(shifted, Vector::from_values(space, {7.0, 3.4})));
  CHECK_FALSE(plank_contains(shifted, Vector::from_values(space, {0.0, 0.0})));
}

TEST_CASE("planks from a sequence") {
  const auto xs = scaled_basis(4);
  const auto planks = planks_from_sequence(xs);
  REQUIRE(planks.size() == 4);
  CHECK(planks[3].width == doctest::Approx(0.25));
  CHECK(norm(planks[3].direction) == doctest::Approx(1.0));
  const auto b = budget_sums(planks);
  CHECK(b.sum_widths == doctest::Approx(1.0 + 0.5 + 1.0 / 3 + 0.25));
  CHECK(b.sum_widths_sq == doctest::Approx(1.0 + 0.25 + 1.0 / 9 + 1.0 / 16));
}

TEST_CASE("Monte Carlo coverage") {
  const auto space = SpaceModel::euclidean_real(3);
  const auto empty = coverage_mc({}, space, 1.0, 500, 3);
  CHECK(empty.uncovered_fraction == 1.0);
  CHECK(empty.uncovered_points.size() == 10);

  const std::vector<Plank> wide = {Plank::make(Vector::basis(space, 1), 2.0)};
  CHECK(coverage_mc(wide, space, 1.0, 500, 3).uncovered_fraction == 0.0);

  // One plank of width 1 through the centre of the unit 3-ball covers
  // volume fraction 11/16.
  const std::vector<Plank> half = {Plank::make(Vector::basis(space, 1), 1.0)};
  const auto r = coverage_mc(half, space, 1.0, 200000, 5);
  CHECK(std::abs(r.uncovered_fraction - 5.0 / 16.0) < 0.005);
  const auto again = coverage_mc(half, space, 1.0, 200000, 5);
  CHECK(again.uncovered == r.uncovered);

  for (std::uint64_t i = 0; i < 100; ++i) CHECK(norm(ball_sample(space, 2.0, 1, i)) <= 2.0);
  CHECK_THROWS_AS(coverage_mc(half, SpaceModel::lp(3, 3), 1.0, 10, 0), InvalidInput);
}

TEST_CASE("parallel planks cover exactly by interval union") {
  const auto space = SpaceModel::euclidean_real(2);
  const auto e = Vector::basis(space, 1);
  auto at = [&](double c, double w) { return Plank::make(e, w, c * e); };
  const Vector center = Vector::zero(space);
  CHECK(parallel_planks_cover_ball(std::vector<Plank>{at(-0.5, 1.0), at(0.5, 1.0)}, center, 1.0));
  CHECK_FALSE(parallel_planks_cover_ball(std::vector<Plank>{at(-0.5, 1.0), at(0.6, 0.9)}, center, 1.0));
  CHECK_FALSE(parallel_planks_cover_ball(std::vector<Plank>{at(-0.6, 0.9), at(0.5, 1.0)}, center, 1.0));
  // Total width 2 is exactly the diameter.
  CHECK(parallel_planks_cover_ball(
      std::vector<Plank>{at(-0.75, 0.5), at(-0.25, 0.5), at(0.25, 0.5), at(0.75, 0.5)}, center, 1.0));
  const std::vector<Plank> skew = {at(0.0, 1.0), Plank::make(Vector::basis(space, 2), 1.0)};
  CHECK_THROWS_AS(parallel_planks_cover_ball(skew, center, 1.0), InvalidInput);
}

TEST_CASE("orthogonal closed form gives margin delta/2") {
  const auto xs = scaled_basis(50);
  CHECK(mutually_orthogonal(xs));
  const auto h = orthogonal_initializer(xs, 0.5, 0.2);
  for (double m : witness_margins(xs, h, 0.5)) CHECK(m == doctest::Approx(0.1).epsilon(1e-12));

  auto skew = xs;
  skew[1].values[0] = 1e-3;
  CHECK_FALSE(mutually_orthogonal(skew));
}

TEST_CASE("witness search on orthogonal families") {
  const auto xs = scaled_basis(50);
  WitnessOptions opt;
  opt.restarts = 4;
  opt.budget = 2000;
  const auto rep = witness_search(xs, opt);
  CHECK(rep.success);
  CHECK(rep.orthogonal_start);
  CHECK(rep.min_margin >= 0.09);
  CHECK(rep.witness_norm <= rep.search_radius * (1.0 + 1e-12));
  double R2 = 0.0;
  for (std::size_t n = 1; n <= 50; ++n) R2 += 1.0 / static_cast<double>(n * n);
  CHECK(rep.norm_radius == doctest::Approx(std::sqrt(R2)));
  CHECK(rep.target_radius == doctest::Approx(rep.norm_radius + 0.1));
  const auto recheck = witness_margins(xs, rep.witness, 0.5);
  for (std::size_t i = 0; i < recheck.size(); ++i) CHECK(recheck[i] == doctest::Approx(rep.margins[i]));

  // Any witness needs |h_n| > n/2 / n, so ‖h‖ > R/2; a smaller ball has none.
  opt.radius = 0.45 * rep.norm_radius;
  const auto small = witness_search(xs, opt);
  CHECK_FALSE(small.success);
  CHECK(small.min_margin <= 0.0);
}

TEST_CASE("witness search after rotation") {
  const auto fam = NormFamily::power(1, 1);
  const auto space = SpaceModel::euclidean_real(20);
  const auto xs = main_theorem_sequence(space, fam, 20, std::uint64_t{3});
  CHECK(mutually_orthogonal(xs));
  WitnessOptions opt;
  opt.restarts = 8;
  opt.budget = 3000;
  opt.seed = 4;
  const auto rep = witness_search(xs, opt);
  CHECK(rep.success);
  CHECK(rep.min_margin >= 0.05);
  const auto twice = witness_search(xs, opt);
  CHECK(twice.witness.values == rep.witness.values);
}

TEST_CASE("witness search rejects bad input") {
  const auto space = SpaceModel::euclidean_real(2);
  CHECK_THROWS_AS(witness_search(std::vector<Vector>{}), InvalidInput);
  CHECK_THROWS_AS(witness_search(std::vector<Vector>{Vector::zero(space)}), InvalidInput);
  const std::vector<Vector> lp = {Vector::basis(SpaceModel::lp(3, 2), 1)};
  CHECK_THROWS_AS(witness_search(lp), InvalidInput);
}

TEST_CASE("cylinders and neighbourhoods") {
  const auto space = SpaceModel::euclidean_real(3);
  const auto c = Cylinder::make(2.0 * Vector::basis(space, 1), 3);
  CHECK(c.base_radius == doctest::Approx(0.5));
  const auto inside = ProductVector::make(
      {0.3 * Vector::basis(space, 1), 0.3 * Vector::basis(space, 1), Vector::basis(space, 2)});
  CHECK(cylinder_contains(c, inside));
  const auto outside = ProductVector::make(
      {0.4 * Vector::basis(space, 1), 0.4 * Vector::basis(space, 1), 0.1 * Vector::basis(space, 1)});
  CHECK_FALSE(cylinder_contains(c, outside));
  const auto two = ProductVector::make({Vector::basis(space, 1), Vector::basis(space, 2)});
  CHECK_THROWS_AS(cylinder_contains(c, two), InvalidInput);

  const std::vector<Vector> xs = {Vector::basis(space, 2), Vector::basis(space, 3), Vector::basis(space, 1)};
  const auto g = ProductVector::make({Vector::basis(space, 1), Vector::zero(space), Vector::zero(space)});
  const auto m = separating_neighborhood(g, xs);
  CHECK(m.value == 0.0);
  CHECK(m.index == 1);
}

TEST_CASE("counterexample demo on a small horizon") {
  DemoOptions opt;
  opt.probes = 10;
  opt.seed = 2;
  const auto rep = counterexample_demo(NormFamily::power(1, 0.5), 200, opt);
  CHECK(rep.horizon == 200);
  CHECK(rep.probes.size() == 10);
  CHECK(rep.all_probes_covered);
  CHECK(rep.no_probe_separates);
  CHECK(rep.a2_partial_sum == doctest::Approx(partial_sum(NormFamily::power(1, 0.5), 2, 200)));
  CHECK(rep.r3_partial_sum == doctest::Approx(partial_sum(NormFamily::power(1, 0.5), 3, 200)));
  REQUIRE(rep.r3_tail_bound.has_value());
  for (const auto& p : rep.probes) {
    for (auto i : p.covering_indices) CHECK(i <= 201);
  }
  CHECK_THROWS_AS(counterexample_demo(NormFamily::power(1, 1), 10), PreconditionFailed);
  CHECK_THROWS_AS(counterexample_demo(NormFamily::power(1, 0.25), 10), PreconditionFailed);
}
