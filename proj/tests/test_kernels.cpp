#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "plankforge/constructions.hpp"
#include "plankforge/kernels.hpp"
#include "plankforge/plank.hpp"

using namespace plankforge;

namespace {

std::vector<Vector> random_vectors(const SpaceModel& space, std::size_t n, std::uint64_t seed) {
  std::vector<Vector> xs;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back((0.5 + static_cast<double>(i % 3)) * random_unit(space, seed, i));
  }
  return xs;
}

// Runs `f` with 1 and with 4 threads and returns both results.
template <class F>
auto at_thread_counts(F&& f) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto one = f();
  omp_set_num_threads(4);
  auto four = f();
  omp_set_num_threads(saved);
  return std::make_pair(one, four);
}

}  // namespace

TEST_CASE("row kernels match the serial reference exactly") {
  const auto fam = NormFamily::power(1, 0.5);
  const auto w = main_theorem_weights(fam, 700);
  CHECK(kernels::row_sum_errors(w) == reference::row_sum_errors(w));
  const auto a = ScalarSequence::from_function(700, [](std::size_t m) { return std::sin(double(m)); });
  CHECK(kernels::row_transforms(w, a) == reference::row_transforms(w, a));
  const auto [one, four] = at_thread_counts([&] { return kernels::row_transforms(w, a); });
  CHECK(one == four);

  const auto part = block_partition(fam, 1.5, 6, 1.0);
  const auto bw = block_weights(fam, part);
  CHECK(kernels::row_sum_errors(bw) == reference::row_sum_errors(bw));
}

TEST_CASE("coverage flags match the serial reference") {
  const auto space = SpaceModel::euclidean_real(5);
  const auto planks = planks_from_sequence(random_vectors(space, 6, 2));
  const auto par = kernels::coverage_flags(planks, space, 1.5, 5000, 9);
  CHECK(par == reference::coverage_flags(planks, space, 1.5, 5000, 9));
  const auto [one, four] = at_thread_counts([&] { return kernels::coverage_flags(planks, space, 1.5, 5000, 9); });
  CHECK(one == four);
}

TEST_CASE("sign search agrees with binary-order enumeration") {
  for (const auto& space : {SpaceModel::euclidean_real(4), SpaceModel::lp(3, 5), SpaceModel::sup(6),
                            SpaceModel::euclidean_complex(3)}) {
    CAPTURE(space.descriptor());
    for (std::size_t n : {1u, 2u, 7u, 14u}) {
      CAPTURE(n);
      const auto block = VectorBlock::from(random_vectors(space, n, 40 + n));
      const auto par = kernels::best_sign_pattern(block);
      const auto ref = reference::best_sign_pattern(block);
      CHECK(par.visited == ref.visited);
      CHECK(std::abs(par.best_norm - ref.best_norm) <= 1e-12 * ref.best_norm);
      CHECK(par.pattern == ref.pattern);
      const auto [one, four] = at_thread_counts([&] { return kernels::best_sign_pattern(block); });
      CHECK(one.pattern == four.pattern);
      CHECK(one.best_norm == four.best_norm);
    }
  }
}

TEST_CASE("sampled sign search and mean square") {
  const auto space = SpaceModel::euclidean_real(8);
  const auto block = VectorBlock::from(random_vectors(space, 12, 5));
  const auto par = kernels::sampled_sign_pattern(block, 9000, 3);
  const auto ref = reference::sampled_sign_pattern(block, 9000, 3);
  CHECK(par.pattern == ref.pattern);
  CHECK(par.best_norm == ref.best_norm);
  CHECK(par.visited == 9000);
  CHECK(par.best_norm <= kernels::best_sign_pattern(block).best_norm * (1 + 1e-12));

  const double ms = kernels::sign_mean_square(block);
  CHECK(std::abs(ms - reference::sign_mean_square(block)) <= 1e-12 * ms);
  const auto [one, four] = at_thread_counts([&] { return kernels::sign_mean_square(block); });
  CHECK(one == four);
}

TEST_CASE("witness restarts match the serial reference") {
  const auto space = SpaceModel::euclidean_real(6);
  const auto xs = random_vectors(space, 5, 8);
  WitnessOptions opt;
  opt.restarts = 6;
  opt.budget = 500;
  opt.seed = 1;
  const auto par = kernels::witness_restarts(xs, 3.0, opt, false);
  const auto ref = reference::witness_restarts(xs, 3.0, opt, false);
  REQUIRE(par.size() == ref.size());
  for (std::size_t r = 0; r < par.size(); ++r) {
    CHECK(par[r].h.values == ref[r].h.values);
    CHECK(par[r].min_margin == ref[r].min_margin);
    CHECK(par[r].evaluations == ref[r].evaluations);
  }
}

TEST_CASE("thread count does not change witness or demo reports") {
  const auto fam = NormFamily::power(1, 1);
  const auto xs = main_theorem_sequence(SpaceModel::euclidean_real(15), fam, 15, std::uint64_t{2});
  WitnessOptions opt;
  opt.restarts = 5;
  opt.budget = 800;
  const auto [w1, w4] = at_thread_counts([&] { return witness_search(xs, opt); });
  CHECK(w1.witness.values == w4.witness.values);
  CHECK(w1.best_restart == w4.best_restart);

  DemoOptions d;
  d.probes = 5;
  const auto [d1, d4] = at_thread_counts([&] { return counterexample_demo(NormFamily::power(1, 0.5), 300, d); });
  CHECK(d1.r3_partial_sum == d4.r3_partial_sum);
  for (std::size_t i = 0; i < d1.probes.size(); ++i) {
    CHECK(d1.probes[i].covering_indices == d4.probes[i].covering_indices);
  }
}
