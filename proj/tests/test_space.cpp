#include <doctest.h>

#include <cmath>
#include <limits>

#include "plankforge/error.hpp"
#include "plankforge/rng.hpp"
#include "plankforge/space.hpp"

using namespace plankforge;

TEST_CASE("space descriptors parse and print") {
  const auto lp = SpaceModel::parse("lp:3:64");
  CHECK(lp.kind == SpaceKind::lp);
  CHECK(lp.p == 3.0);
  CHECK(lp.dimension == 64);
  CHECK(lp.descriptor() == "lp:3:64");
  CHECK(lp.dual_exponent() == doctest::Approx(1.5));

  CHECK(SpaceModel::parse("euclidean-real:100") == SpaceModel::euclidean_real(100));
  CHECK(SpaceModel::parse("euclidean-real:2:100") == SpaceModel::euclidean_real(100));
  CHECK(SpaceModel::parse("euclidean-complex:2:8").is_complex());
  CHECK(SpaceModel::parse("sup:16") == SpaceModel::sup(16));
  CHECK(SpaceModel::parse("sup:inf:16").dual_exponent() == 1.0);

  for (const char* bad : {"", "lp:3", "lp:0.5:4", "hilbert:2:4", "euclidean-real:3:4", "sup:2:4",
                          "lp:3:0", "lp:x:4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(SpaceModel::parse(bad), InvalidInput);
  }
}

TEST_CASE("norms and dual norms in each model") {
  const auto l3 = SpaceModel::lp(3, 2);
  const auto v = Vector::from_values(l3, {1.0, 1.0});
  CHECK(norm(v) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  const auto f = Functional::from_values(l3, {1.0, 1.0});
  CHECK(dual_norm(f) == doctest::Approx(std::pow(2.0, 1.0 / 1.5)).epsilon(1e-15));

  const auto sup = SpaceModel::sup(3);
  CHECK(norm(Vector::from_values(sup, {1.0, -4.0, 2.0})) == 4.0);
  CHECK(dual_norm(Functional::from_values(sup, {1.0, -4.0, 2.0})) == 7.0);

  const auto c2 = SpaceModel::euclidean_complex(2);
  auto z = Vector::zero(c2);
  z.set_coordinate(1, {3.0, 4.0});
  CHECK(norm(z) == doctest::Approx(5.0));

  CHECK_THROWS_AS(norm(SpaceModel::euclidean_real(2), v), SpaceMismatch);
  CHECK_THROWS_AS(Vector::basis(l3, 3), OutOfRange);
  CHECK_THROWS_AS(Vector::basis(l3, 0), OutOfRange);
}

TEST_CASE("pairing is conjugate-linear in the functional") {
  const auto c1 = SpaceModel::euclidean_complex(1);
  auto f = Functional::basis(c1, 1);
  f.set_coordinate(1, {0.0, 1.0});
  const auto v = Vector::basis(c1, 1);
  const Scalar s = pair(f, v);
  CHECK(s.real() == 0.0);
  CHECK(s.imag() == -1.0);
  const auto iv = scaled(v, {0.0, 1.0});
  CHECK(pair(f, iv) == Scalar(1.0, 0.0));
}

TEST_CASE("random units have norm one and are reproducible") {
  for (const auto& space : {SpaceModel::euclidean_real(7), SpaceModel::euclidean_complex(5),
                            SpaceModel::lp(3, 9), SpaceModel::sup(4)}) {
    CAPTURE(space.descriptor());
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto u = random_unit(space, 42, i);
      CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(u.values == random_unit(space, 42, i).values);
      const auto f = random_unit_functional(space, 42, i);
      CHECK(dual_norm(f) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(random_unit(space, 1, 0).values != random_unit(space, 2, 0).values);
  }
}

TEST_CASE("counter-based generator streams") {
  SplitMix64 a(7, 3);
  SplitMix64 b(stream_key(7, 3));
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  SplitMix64 g(1, 0);
  double mean = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(g);
    mean += z;
    sq += z * z;
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("random rotations are orthogonal") {
  for (const auto& space : {SpaceModel::euclidean_real(12), SpaceModel::euclidean_complex(6)}) {
    CAPTURE(space.descriptor());
    const Rotation r = random_rotation(space, 9);
    for (std::size_t i = 1; i <= space.dimension; ++i) {
      for (std::size_t j = 1; j <= space.dimension; ++j) {
        const Scalar g = inner(r.column(i), r.column(j));
        CHECK(std::abs(g - Scalar(i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
    const auto x = random_unit(space, 3, 0);
    const auto y = random_unit(space, 3, 1);
    CHECK(std::abs(inner(r.apply(x), r.apply(y)) - inner(x, y)) < 1e-12);
    const auto back = r.apply_adjoint(r.apply(x));
    for (std::size_t i = 0; i < x.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(x.values[i]));
    // Rotating both sides of the pairing leaves it unchanged.
    const auto f = random_unit_functional(space, 5, 0);
    CHECK(std::abs(pair(r.apply(f), r.apply(x)) - pair(f, x)) < 1e-12);
    CHECK(random_rotation(space, 9).column(2).values == r.column(2).values);
  }
  CHECK_THROWS_AS(random_rotation(SpaceModel::lp(3, 4), 0), InvalidInput);
}

TEST_CASE("product vectors") {
  const auto h = SpaceModel::euclidean_real(3);
  const auto g = ProductVector::make({Vector::basis(h, 1), 2.0 * Vector::basis(h, 2),
                                      Vector::zero(h)});
  CHECK(g.k() == 3);
  CHECK(norm(g) == doctest::Approx(std::sqrt(5.0)));
  const auto x = Vector::from_values(h, {1.0, 1.0, 1.0});
  CHECK(product_pair_sq(g, x) == doctest::Approx(5.0));
  CHECK_THROWS_AS(ProductVector::make({}), InvalidInput);
}
