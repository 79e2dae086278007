#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "plankforge/constructions.hpp"
#include "plankforge/error.hpp"

using namespace plankforge;

TEST_CASE("norm family descriptors") {
  const auto p = NormFamily::parse("power:2:0.5");
  CHECK(p.value(4) == doctest::Approx(4.0));
  CHECK(p.descriptor() == "power:2:0.5");
  const auto pl = NormFamily::parse("powerlog:0.5:1");
  CHECK(pl.value(3) == doctest::Approx(std::sqrt(3.0) * std::log(4.0)));
  CHECK_THROWS_AS(NormFamily::parse("power:0:1"), InvalidInput);
  CHECK_THROWS_AS(NormFamily::parse("power:1"), InvalidInput);
  CHECK_THROWS_AS(NormFamily::parse("gauss:1:1"), InvalidInput);
  CHECK_THROWS_AS(p.value(0), OutOfRange);

  const std::string path = (std::filesystem::temp_directory_path() / "plankforge_family_test.csv").string();
  {
    std::ofstream f(path);
    f << "1\n2\n4\n";
  }
  const auto e = NormFamily::parse("explicit:@" + path);
  CHECK(e.kind() == NormFamily::Kind::explicit_list);
  CHECK(e.value(3) == 4.0);
  CHECK(e.max_index() == 3);
  CHECK_THROWS_AS(e.value(4), OutOfRange);
  CHECK_THROWS_AS(e.divergence(2), NoCertificate);
  CHECK(partial_sum(e, 2, 3) == doctest::Approx(1.0 + 0.25 + 1.0 / 16));
}

TEST_CASE("divergence verdicts") {
  CHECK(NormFamily::power(1, 0.5).divergence(2) == Divergence::divergent);
  CHECK(NormFamily::power(1, 0.5).divergence(3) == Divergence::convergent);
  CHECK(NormFamily::power(1, 1).divergence(2) == Divergence::convergent);
  CHECK(NormFamily::power(1, 1).divergence(1) == Divergence::divergent);
  CHECK(NormFamily::powerlog(0.5, 1).divergence(2) == Divergence::convergent);
  CHECK(NormFamily::powerlog(0.5, 0.5).divergence(2) == Divergence::divergent);
  CHECK(NormFamily::powerlog(0.25, 3).divergence(2) == Divergence::divergent);
}

TEST_CASE("tail bounds dominate the actual tails") {
  struct Case {
    NormFamily fam;
    double q;
  };
  const Case cases[] = {{NormFamily::power(1, 0.5), 3},
                        {NormFamily::power(1, 1), 2},
                        {NormFamily::power(3, 0.75), 2},
                        {NormFamily::powerlog(0.5, 1.5), 2},
                        {NormFamily::powerlog(1, 0), 2}};
  for (const auto& c : cases) {
    CAPTURE(c.fam.descriptor());
    for (std::size_t N : {10u, 100u, 1000u}) {
      const auto bound = c.fam.tail_bound(c.q, N);
      REQUIRE(bound.has_value());
      const double tail = partial_sum(c.fam, c.q, 200000) - partial_sum(c.fam, c.q, N);
      CHECK(tail <= *bound);
    }
  }
  CHECK_FALSE(NormFamily::power(1, 0.5).tail_bound(2, 10).has_value());
}

TEST_CASE("partial sums against closed forms") {
  CHECK(partial_sum(NormFamily::power(1, 0.5), 2, 1000) == doctest::Approx(7.485470860550345).epsilon(1e-14));
  CHECK(partial_sum(NormFamily::power(1, 1), 2, 10000) == doctest::Approx(1.6448340718480652).epsilon(1e-13));
  CHECK(partial_sum(NormFamily::power(1, 0.5), 3, 10000) == doctest::Approx(2.5924).epsilon(1e-4));
}

TEST_CASE("exponent pairs") {
  CHECK(ExponentPair::from_p(3).p_prime == doctest::Approx(1.5));
  CHECK(ExponentPair::from_p(std::numeric_limits<double>::infinity()).p_prime == 1.0);
  CHECK(ExponentPair::from_p_prime(1.5).p == doctest::Approx(3.0));
  CHECK(std::isinf(ExponentPair::from_p_prime(1).p));
  CHECK_THROWS_AS(ExponentPair::from_p(1.5), InvalidInput);
  CHECK_THROWS_AS(ExponentPair::from_p_prime(2.5), InvalidInput);
}

TEST_CASE("main construction") {
  const auto fam = NormFamily::power(1, 0.5);
  const auto space = SpaceModel::euclidean_real(20);
  const auto xs = main_theorem_sequence(space, fam, 20);
  CHECK(norm(xs[8]) == doctest::Approx(3.0));
  CHECK_THROWS_AS(main_theorem_sequence(SpaceModel::euclidean_real(5), fam, 20), InvalidInput);

  const auto rotated = main_theorem_sequence(space, fam, 20, std::uint64_t{11});
  for (std::size_t n = 0; n < 20; ++n) CHECK(norm(rotated[n]) == doctest::Approx(norm(xs[n])));
  CHECK(std::abs(inner(rotated[2], rotated[5])) < 1e-12);

  const auto w = main_theorem_weights(fam, 20);
  const auto f = random_unit_functional(space, 3);
  for (const auto& b : main_transform_bounds(w, fam, xs, f)) {
    CHECK(b.holds);
    CHECK(b.lhs <= b.rhs + 1e-12);
  }
}

TEST_CASE("greedy block partition") {
  const auto fam = NormFamily::power(1, 0.5);
  const auto part = block_partition(fam, 2, 5, 1.0);
  REQUIRE(part.blocks() == 5);
  CHECK(part.boundaries[0] == 0);
  CHECK(part.boundaries[1] == 1);
  CHECK(part.boundaries[2] == 11);
  for (std::size_t k = 1; k <= 5; ++k) {
    CHECK(part.sums[k - 1] >= static_cast<double>(k));
    CHECK(part.sums[k - 1] >= part.sums[0]);
  }
  CHECK(part.block_of(1) == 1);
  CHECK(part.block_of(11) == 2);
  CHECK(part.block_of(12) == 3);
  CHECK_NOTHROW(part.verify(fam));

  auto tampered = part;
  tampered.sums[2] += 1e-9;
  CHECK_THROWS_AS(tampered.verify(fam), InvalidInput);

  CHECK_THROWS_AS(block_partition(NormFamily::power(1, 1), 2, 5, 1.0), ConstructionImpossible);
  CHECK_THROWS_AS(block_partition(NormFamily::powerlog(0.5, 0.5), 2, 50, 1.0, 1000), ResourceExhausted);
  CHECK_THROWS_AS(BlockPartition::from_boundaries(fam, 2, {0, 3, 3}), InvalidInput);
  CHECK_THROWS_AS(BlockPartition::from_boundaries(fam, 2, {1, 3}), InvalidInput);

  const auto w = block_weights(fam, part);
  CHECK(w.rows() == 5);
  CHECK(validate_weights(w, 1e-12, 1.1).pass);
}

TEST_CASE("block transform bound") {
  const auto fam = NormFamily::power(1, 0.5);
  const auto e = ExponentPair::from_p(3);
  const auto part = block_partition(fam, e.p_prime, 4, 1.0);
  const auto space = SpaceModel::lp(3, std::max<std::size_t>(part.horizon(), 64));
  const auto basis = block_basis(space, part);
  CHECK(basis.transform_constant() == 1.0);
  CHECK(basis.measured_distortion < 1e-12);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto f = random_unit_functional(space, 5, i);
    for (std::size_t k = 1; k <= part.blocks(); ++k) {
      const auto b = wpp_transform_bound(basis, fam, part, f, k);
      CHECK(b.holds);
      CHECK(b.measured_constant <= 1.0 + 1e-12);
    }
  }
  CHECK_THROWS_AS(block_basis(SpaceModel::lp(3, part.horizon() - 1), part), InvalidInput);
  CHECK_THROWS_AS(block_basis(SpaceModel::lp(4, part.horizon()), part), InvalidInput);

  PerturbationOptions opt;
  opt.seed = 7;
  const auto noisy = block_basis(space, part, opt);
  CHECK(noisy.perturbed);
  CHECK(noisy.transform_constant() == 2.0);
  CHECK(noisy.measured_distortion < 0.125);
  for (const auto& v : noisy.vectors) CHECK(norm(v) == doctest::Approx(1.0));
}

TEST_CASE("cluster surrogate") {
  const auto fam = NormFamily::power(1, 0.5);
  const std::size_t N = 50;
  const auto space = SpaceModel::euclidean_real(N);
  const auto xs = main_theorem_sequence(space, fam, N);
  const auto w = main_theorem_weights(fam, N);
  std::vector<Functional> fs;
  for (std::uint64_t i = 0; i < 3; ++i) fs.push_back(random_unit_functional(space, 8, i));
  const auto c = cluster_surrogate(w, xs, fs, 2.0, N, partial_sum(fam, 2, N), 1.0);
  CHECK(c.holds);
  CHECK(c.column >= 1);
  CHECK(c.column <= N);
  CHECK(c.value <= c.average * (1.0 + 1e-12));
}
