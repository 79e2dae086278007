#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "plankforge/io.hpp"

using plankforge::io::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = plankforge::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("plankforge_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("every subcommand is deterministic") {
  const std::vector<std::vector<std::string>> commands = {
      {"construct", "--family", "power:1:0.5", "--n", "50"},
      {"construct", "--family", "power:1:0.5", "--mode", "block", "--blocks", "4", "--p", "3"},
      {"transform", "--family", "power:1:0.5", "--n", "60", "--seed", "5"},
      {"witness", "--family", "power:1:1", "--n", "12", "--rotate", "3", "--restarts", "4", "--budget", "600"},
      {"coverage", "--family", "power:1:1", "--n", "6", "--radius", "1", "--samples", "3000", "--seed", "8"},
      {"counterexample", "--family", "power:1:0.5", "--n", "300", "--probes", "8", "--seed", "2"},
      {"cotype", "--family", "power:1:0", "--n", "9", "--space", "sup:9"},
      {"necessary", "--family", "power:1:0.5", "--n", "800", "--p-prime", "2"}};
  for (const auto& cmd : commands) {
    for (const char* format : {"json", "csv"}) {
      auto args = cmd;
      args.insert(args.end(), {"--format", format});
      CAPTURE(args[0]);
      CAPTURE(format);
      const Run a = run(args);
      const Run b = run(args);
      CHECK(a.code == 0);
      CHECK(a.err == "");
      CHECK(!a.out.empty());
      CHECK(a.out == b.out);
    }
  }
}

TEST_CASE("reports embed config and version") {
  const Run r = run({"necessary", "--family", "power:1:1", "--n", "100"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["version"] == plankforge::cli::version());
  CHECK(j["config"]["family"] == "power:1:1");
  CHECK(j["config"]["n"] == 100);
  CHECK(j["status"] == "ok");
  CHECK(j["consistency"] == "consistent");
}

TEST_CASE("usage errors exit 1 and name the field") {
  Run r = run({"witness", "--n", "abc"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--n") != std::string::npos);
  r = run({"witness", "--family", "power:x:1", "--n", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--family") != std::string::npos);
  r = run({"coverage", "--family", "power:1:1", "--n", "3", "--space", "lp:3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--space") != std::string::npos);
  r = run({"construct", "--family", "power:1:1", "--n", "3", "--mode", "sideways"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--mode") != std::string::npos);
  CHECK(run({"witness", "--format", "xml"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  r = run({"construct", "--family", "power:1:1", "--mode", "block"});
  CHECK(r.code == 1);
  CHECK(r.err.find("converges") != std::string::npos);
  CHECK(run({"validate", "--in", temp_path("does_not_exist")}).code == 1);
}

TEST_CASE("construct output validates and round-trips") {
  const std::string weights = temp_path("weights.txt");
  const std::string vectors = temp_path("vectors.csv");
  const std::string report = temp_path("construct.json");
  Run r = run({"construct", "--family", "power:1:0.5", "--n", "100", "--mode", "main", "--weights", weights,
               "--vectors", vectors, "--out", report});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json rep = json::parse(slurp(report));
  CHECK(rep["validation"]["pass"] == true);

  r = run({"validate", "--in", weights, "--vectors", vectors, "--space", "euclidean-real:100"});
  CHECK(r.code == 0);
  const json v = json::parse(r.out);
  CHECK(v["pass"] == true);
  CHECK(v["holder"]["pass"] == true);

  // The embedded-weights report is itself accepted by validate.
  const std::string embedded = temp_path("embedded.json");
  REQUIRE(run({"construct", "--family", "power:1:0.5", "--n", "40", "--out", embedded}).code == 0);
  CHECK(run({"validate", "--in", embedded}).code == 0);

  r = run({"validate", "--in", weights, "--format", "csv"});
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 101);
}

TEST_CASE("violations exit 2 and still write the report") {
  const std::string bad = temp_path("bad_weights.txt");
  {
    std::ofstream f(bad);
    f << "rows=4 tol=1e-12\n1:0.9\n2:1\n3:1\n4:1\n";
  }
  Run r = run({"validate", "--in", bad});
  CHECK(r.code == 2);
  CHECK(json::parse(r.out)["status"] == "violation");
  CHECK(r.err.find("violation") != std::string::npos);

  // A zero vector makes the Hölder factor undefined: input error, not a violation.
  const std::string zero = temp_path("zero.csv");
  {
    std::ofstream f(zero);
    f << "0,0\n1,0\n";
  }
  const std::string w2 = temp_path("w2.txt");
  {
    std::ofstream f(w2);
    f << "rows=1 tol=1e-12\n1:0.5 2:0.5\n";
  }
  CHECK(run({"validate", "--in", w2, "--vectors", zero, "--space", "euclidean-real:2"}).code == 1);
}

TEST_CASE("coverage with zero planks is fully uncovered") {
  const std::string empty = temp_path("empty.csv");
  { std::ofstream f(empty); }
  const Run r = run({"coverage", "--in", empty, "--space", "euclidean-real:3", "--radius", "2", "--samples", "200"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["uncovered_fraction"] == 1.0);
  CHECK(j["planks"] == 0);
}

TEST_CASE("witness subcommand example") {
  const Run r = run({"witness", "--family", "power:1:1", "--n", "10"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["success"] == true);
  CHECK(j["min_margin"].get<double>() >= 0.09);
  CHECK(j["recheck_min_margin"].get<double>() > 0.0);
}

TEST_CASE("transform reads a scalar sequence") {
  const std::string seq = temp_path("seq.csv");
  {
    std::ofstream f(seq);
    f << "1,0,0,0,0,0,0,0\n";
  }
  const Run r = run({"transform", "--family", "power:1:0.5", "--n", "8", "--sequence", seq});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["values"].size() == 8);
  CHECK(j["first_value"] == 1.0);
}
