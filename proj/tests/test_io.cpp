#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "plankforge/constructions.hpp"
#include "plankforge/error.hpp"
#include "plankforge/io.hpp"

using namespace plankforge;
using io::json;

TEST_CASE("canonical JSON") {
  json j = {{"b", 0.1}, {"a", {1, 2}}, {"c", std::nan("")}, {"d", std::numeric_limits<double>::infinity()},
            {"e", "x\"y"}, {"f", json::object()}};
  const std::string s = io::canonical_dump(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"c\": null") != std::string::npos);
  CHECK(s.find("\"d\": null") != std::string::npos);
  CHECK(s.find("\"x\\\"y\"") != std::string::npos);
  CHECK(s.back() == '\n');
  const json back = json::parse(s);
  CHECK(back["b"].get<double>() == 0.1);
  CHECK(io::canonical_dump(back) == s);
}

TEST_CASE("weights round-trip through text and JSON") {
  const auto fam = NormFamily::power(1, 0.5);
  const auto w = main_theorem_weights(fam, 30);
  std::stringstream text;
  io::write_weights_text(text, w, 1e-12);
  const auto from_text = io::read_weights_text(text);
  REQUIRE(from_text.rows() == 30);
  for (std::size_t n = 1; n <= 30; ++n) CHECK(from_text.row(n) == w.row(n));

  const json j = json::parse(io::canonical_dump(io::weights_to_json(w)));
  const auto from_json = io::weights_from_json(j);
  for (std::size_t n = 1; n <= 30; ++n) CHECK(from_json.row(n) == w.row(n));
  CHECK(io::weights_from_json(json{{"weights", j}}).rows() == 30);

  std::stringstream bad1("rows=2 tol=1e-12\n1:1\n");
  CHECK_THROWS_AS(io::read_weights_text(bad1), InvalidInput);
  std::stringstream bad2("rows=1\n1-1\n");
  CHECK_THROWS_AS(io::read_weights_text(bad2), InvalidInput);
  std::stringstream bad3("1:1\n");
  CHECK_THROWS_AS(io::read_weights_text(bad3), InvalidInput);
  CHECK_THROWS_AS(io::weights_from_json(json::parse("[[[1]]]")), InvalidInput);
}

TEST_CASE("vector CSV") {
  const auto c = SpaceModel::euclidean_complex(2);
  auto v = Vector::zero(c);
  v.set_coordinate(1, {1.0, -2.0});
  v.set_coordinate(2, {0.1, 0.0});
  std::stringstream s;
  const std::vector<Vector> xs = {v, Vector::basis(c, 2)};
  io::write_vectors_csv(s, xs);
  CHECK(s.str().rfind("complex=true\n", 0) == 0);
  const auto back = io::read_vectors_csv(s, c);
  REQUIRE(back.size() == 2);
  CHECK(back[0].values == v.values);

  std::stringstream header_only("complex=true\n1,2\n");
  CHECK_THROWS_AS(io::read_vectors_csv(header_only, SpaceModel::euclidean_real(2)), SpaceMismatch);
  std::stringstream short_row("1,2\n1\n");
  CHECK_THROWS_AS(io::read_vectors_csv(short_row, SpaceModel::euclidean_real(2)), InvalidInput);

  SpaceModel open = SpaceModel::lp(3, 1);
  open.dimension = 0;
  std::stringstream three("1,2,3\n");
  const auto inferred = io::read_vectors_csv(three, open);
  CHECK(inferred.front().space == SpaceModel::lp(3, 3));

  CHECK(io::vector_to_json(v).dump() == "[[1.0,-2.0],[0.1,0.0]]");
}

TEST_CASE("records CSV uses the union of keys") {
  io::Records r = {{{"b", 1}, {"a", "x,y"}}, {{"c", 2.5}}};
  std::stringstream s;
  io::write_records_csv(s, r);
  CHECK(s.str() == "a,b,c\n\"x,y\",1,\n,,2.5\n");
}

TEST_CASE("report field names") {
  CotypeReport r;
  r.p = std::numeric_limits<double>::infinity();
  const json j = io::to_json(r);
  CHECK(j["p"] == "inf");
  for (const char* k : {"ratio", "pattern", "n", "p", "enumerated"}) CHECK(j.contains(k));

  const json d = io::to_json(DemoReport{});
  for (const char* k : {"r3_partial_sum", "a2_partial_sum", "covering_indices", "seed"}) CHECK(d.contains(k));
  const json w = io::to_json(WitnessReport{});
  for (const char* k : {"witness", "margins", "min_margin", "seed", "budget"}) CHECK(w.contains(k));
  CHECK(io::to_json(CoverageReport{}).contains("uncovered_fraction"));
}
