#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "plankforge/constructions.hpp"
#include "plankforge/cotype.hpp"
#include "plankforge/error.hpp"
#include "plankforge/io.hpp"
#include "plankforge/plank.hpp"
#include "plankforge/space.hpp"
#include "plankforge/summability.hpp"
#include "util.hpp"

#ifndef PLANKFORGE_VERSION
#define PLANKFORGE_VERSION "0.0.0"
#endif

namespace plankforge::cli {

using io::json;

namespace {

// Row count above which `construct` refuses to embed weights in the report.
constexpr std::size_t kEmbedLimit = 2'000'000;

struct Config {
  std::string subcommand;
  std::string family;
  std::string space;
  std::size_t n = 0;
  std::string p;
  std::string p_prime;
  std::uint64_t seed = 0;
  std::size_t budget = 10'000;
  std::size_t samples = 10'000;
  std::string radius;
  std::string mode = "main";
  std::string out;
  std::string format = "json";

  std::string in;
  std::string weights;
  std::string vectors;
  std::string sequence;
  std::string threshold;
  double row_tol = 1e-12;
  std::size_t restarts = 32;
  std::size_t blocks = 5;
  double growth = 1.0;
  std::optional<std::uint64_t> rotate;
  std::size_t probes = 100;
  double probe_scale = 10.0;
  bool sampling = false;
  std::optional<std::size_t> basis;
};

json opt_string(const std::string& s) { return s.empty() ? json() : json(s); }

json config_json(const Config& c) {
  return {{"subcommand", c.subcommand},
          {"family", opt_string(c.family)},
          {"space", opt_string(c.space)},
          {"n", c.n == 0 ? json() : json(c.n)},
          {"p", opt_string(c.p)},
          {"p_prime", opt_string(c.p_prime)},
          {"seed", c.seed},
          {"budget", c.budget},
          {"samples", c.samples},
          {"radius", opt_string(c.radius)},
          {"mode", c.mode},
          {"out", opt_string(c.out)},
          {"format", c.format},
          {"in", opt_string(c.in)},
          {"weights", opt_string(c.weights)},
          {"vectors", opt_string(c.vectors)},
          {"sequence", opt_string(c.sequence)},
          {"threshold", opt_string(c.threshold)},
          {"row_tol", c.row_tol},
          {"restarts", c.restarts},
          {"blocks", c.blocks},
          {"growth", c.growth},
          {"rotate", c.rotate ? json(*c.rotate) : json()},
          {"probes", c.probes},
          {"probe_scale", c.probe_scale},
          {"sampling", c.sampling},
          {"basis", c.basis ? json(*c.basis) : json()}};
}

// Re-throws library parse errors with the offending flag named.
template <class F>
auto with_field(const char* flag, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(flag) + ": " + e.what());
  }
}

double parse_number(const std::string& text, const char* flag) {
  return with_field(flag, [&] { return detail::parse_double(text, flag); });
}

double threshold_or(const Config& c, double fallback) {
  return c.threshold.empty() ? fallback : parse_number(c.threshold, "--threshold");
}

NormFamily require_family(const Config& c) {
  if (c.family.empty()) throw InvalidInput("--family is required for '" + c.subcommand + "'");
  return with_field("--family", [&] { return NormFamily::parse(c.family); });
}

std::size_t require_n(const Config& c) {
  if (c.n == 0) throw InvalidInput("--n is required for '" + c.subcommand + "' and must be >= 1");
  return c.n;
}

ExponentPair exponents(const Config& c) {
  if (!c.p.empty() && !c.p_prime.empty()) {
    const auto e = with_field("--p", [&] { return ExponentPair::from_p(parse_number(c.p, "--p")); });
    const double pp = parse_number(c.p_prime, "--p-prime");
    if (std::abs(e.p_prime - pp) > 1e-12) throw InvalidInput("--p and --p-prime are not conjugate");
    return e;
  }
  if (!c.p.empty()) {
    return with_field("--p", [&] { return ExponentPair::from_p(parse_number(c.p, "--p")); });
  }
  if (!c.p_prime.empty()) {
    return with_field("--p-prime",
                      [&] { return ExponentPair::from_p_prime(parse_number(c.p_prime, "--p-prime")); });
  }
  return ExponentPair::from_p(2.0);
}

SpaceModel space_or(const Config& c, SpaceModel fallback) {
  if (c.space.empty()) return fallback;
  return with_field("--space", [&] { return SpaceModel::parse(c.space); });
}

/// Vectors from --vectors/--in, or x_n = a_n e_n (optionally rotated) from the family.
struct Sequence {
  SpaceModel space;
  std::vector<Vector> xs;
  std::optional<NormFamily> family;
};

Sequence load_sequence(const Config& c, const std::string& path) {
  Sequence s;
  if (!path.empty()) {
    if (c.space.empty()) throw InvalidInput("--space is required when reading vectors from a file");
    s.space = space_or(c, SpaceModel::euclidean_real(1));
    s.xs = io::read_vectors_file(path, s.space);
    if (!c.family.empty()) s.family = require_family(c);
    return s;
  }
  const NormFamily fam = require_family(c);
  const std::size_t n = require_n(c);
  s.family = fam;
  s.space = space_or(c, SpaceModel::euclidean_real(n));
  s.xs = main_theorem_sequence(s.space, fam, n, c.rotate);
  return s;
}

std::string vectors_source(const Config& c) { return !c.vectors.empty() ? c.vectors : c.in; }

void write_weights(const std::string& path, const WeightMatrix& w, double tol) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write weights to '" + path + "'");
  const bool as_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (as_json) {
    f << io::canonical_dump(io::weights_to_json(w));
  } else {
    io::write_weights_text(f, w, tol);
  }
  if (!f) throw InvalidInput("write failed for '" + path + "'");
}

void write_vectors(const std::string& path, std::span<const Vector> xs) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write vectors to '" + path + "'");
  io::write_vectors_csv(f, xs);
  if (!f) throw InvalidInput("write failed for '" + path + "'");
}

struct Outcome {
  json report;
  io::Records records;
  bool violation = false;
  std::vector<std::string> messages;
};

// ---------------------------------------------------------------------------

Outcome cmd_validate(const Config& c) {
  const std::string path = !c.in.empty() ? c.in : c.weights;
  if (path.empty()) throw InvalidInput("--in (weight file) is required for 'validate'");
  const WeightMatrix w = with_field("--in", [&] { return io::read_weights_file(path); });
  const ValidationReport rep = validate_weights(w, c.row_tol, threshold_or(c, 1.1));
  Outcome o;
  o.report = io::to_json(rep);
  o.violation = !rep.pass;
  if (!rep.pass) o.messages.push_back("weight matrix failed validation");

  std::vector<double> products;
  if (!c.vectors.empty()) {
    if (c.space.empty()) throw InvalidInput("--space is required with --vectors");
    const SpaceModel space = space_or(c, SpaceModel::euclidean_real(1));
    const auto xs = io::read_vectors_file(c.vectors, space);
    const ExponentPair e = exponents(c);
    std::size_t failures = 0;
    double min_product = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= w.rows(); ++n) {
      const HolderCheck h = holder_row_check(w, xs, e, n);
      products.push_back(h.product);
      min_product = std::min(min_product, h.product);
      if (!h.pass) ++failures;
    }
    o.report["holder"] = {{"rows", w.rows()},
                          {"min_product", min_product},
                          {"failures", failures},
                          {"pass", failures == 0}};
    if (failures) {
      o.violation = true;
      o.messages.push_back("Hölder row check failed on " + std::to_string(failures) + " rows");
    }
  }
  for (std::size_t n = 1; n <= w.rows(); ++n) {
    json r = {{"row", n}, {"row_sum_error", rep.row_sum_errors[n - 1]}};
    if (!products.empty()) r["holder_product"] = products[n - 1];
    o.records.push_back(std::move(r));
  }
  return o;
}

Outcome cmd_construct(const Config& c) {
  const NormFamily fam = require_family(c);
  Outcome o;
  std::optional<WeightMatrix> w;
  std::vector<Vector> xs;
  SpaceModel space;
  if (c.mode == "main") {
    const std::size_t n = require_n(c);
    w = main_theorem_weights(fam, n);
    space = space_or(c, SpaceModel::euclidean_real(n));
    xs = main_theorem_sequence(space, fam, n, c.rotate);
  } else if (c.mode == "block") {
    const ExponentPair e = exponents(c);
    const BlockPartition part =
        c.n ? block_partition(fam, e.p_prime, c.blocks, c.growth, c.n)
            : block_partition(fam, e.p_prime, c.blocks, c.growth);
    w = block_weights(fam, part);
    const std::size_t horizon = part.horizon();
    space = space_or(c, std::isinf(e.p) ? SpaceModel::sup(horizon) : SpaceModel::lp(e.p, horizon));
    xs = main_theorem_sequence(space, fam, horizon, c.rotate);
    o.report["partition"] = io::to_json(part);
  } else {
    throw InvalidInput("--mode must be main or block, got '" + c.mode + "'");
  }

  const ValidationReport rep = validate_weights(*w, c.row_tol, threshold_or(c, 1.1));
  o.report["validation"] = io::to_json(rep);
  o.report["family"] = fam.descriptor();
  o.report["space"] = space.descriptor();
  o.report["rows"] = w->rows();
  o.report["vectors"] = xs.size();
  if (!rep.pass) {
    o.violation = true;
    o.messages.push_back("constructed weights failed validation");
  }

  std::size_t entries = 0;
  for (std::size_t n = 1; n <= w->rows(); ++n) entries += w->support_size(n);
  if (!c.weights.empty()) {
    write_weights(c.weights, *w, c.row_tol);
  } else if (entries <= kEmbedLimit) {
    o.report["weights"] = io::weights_to_json(*w);
  } else {
    throw InvalidInput("--weights <path> is required: " + std::to_string(entries) +
                       " weight entries are too many to embed in the report");
  }
  if (!c.vectors.empty()) write_vectors(c.vectors, xs);

  for (std::size_t n = 1; n <= w->rows(); ++n) {
    o.records.push_back({{"row", n},
                         {"support_size", w->support_size(n)},
                         {"support_max", w->support_max(n)},
                         {"row_sum_error", rep.row_sum_errors[n - 1]}});
  }
  return o;
}

Outcome cmd_transform(const Config& c) {
  Outcome o;
  std::optional<WeightMatrix> w;
  if (!c.weights.empty()) {
    w = with_field("--weights", [&] { return io::read_weights_file(c.weights); });
  } else {
    w = main_theorem_weights(require_family(c), require_n(c));
  }

  std::optional<ScalarSequence> a;
  std::vector<TransformBound> bounds;
  if (!c.sequence.empty()) {
    a = io::read_sequence_file(c.sequence);
  } else {
    const Sequence s = load_sequence(c, vectors_source(c));
    const ExponentPair e = exponents(c);
    Functional f = c.basis ? Functional::basis(s.space, *c.basis)
                           : random_unit_functional(s.space, c.seed, 0);
    if (c.basis && c.rotate) f = random_rotation(s.space, *c.rotate).apply(f);
    std::vector<double> values(s.xs.size());
    for (std::size_t m = 0; m < s.xs.size(); ++m) {
      values[m] = std::pow(std::abs(pair(f, s.xs[m])), e.p_prime);
    }
    a = ScalarSequence(std::move(values));
    o.report["functional_norm"] = dual_norm(f);
    if (s.family && s.space.is_euclidean() && e.p_prime == 2.0) {
      bounds = main_transform_bounds(*w, *s.family, s.xs, f);
      std::size_t failures = 0;
      double worst = 0.0;
      for (const auto& b : bounds) {
        if (!b.holds) ++failures;
        worst = std::max(worst, b.measured_constant);
      }
      o.report["bounds"] = {{"rows", bounds.size()},
                            {"failures", failures},
                            {"max_measured_constant", worst},
                            {"all_hold", failures == 0}};
      if (failures) {
        o.violation = true;
        o.messages.push_back("transform bound failed on " + std::to_string(failures) + " rows");
      }
    }
  }
  const TrendReport trend = p_limit_trend(*w, *a, threshold_or(c, 0.2));
  json t = io::to_json(trend);
  for (auto it = t.begin(); it != t.end(); ++it) o.report[it.key()] = it.value();
  for (std::size_t n = 1; n <= trend.values.size(); ++n) {
    json r = {{"row", n}, {"value", trend.values[n - 1]}};
    if (!bounds.empty()) r["bound"] = bounds[n - 1].rhs;
    o.records.push_back(std::move(r));
  }
  return o;
}

Outcome cmd_witness(const Config& c) {
  const Sequence s = load_sequence(c, vectors_source(c));
  WitnessOptions opt;
  opt.threshold = threshold_or(c, 0.5);
  opt.budget = c.budget;
  opt.restarts = c.restarts;
  opt.seed = c.seed;
  if (!c.radius.empty()) opt.radius = parse_number(c.radius, "--radius");
  const WitnessReport rep = witness_search(s.xs, opt);

  Outcome o;
  o.report = io::to_json(rep);
  const auto recheck = witness_margins(s.xs, rep.witness, opt.threshold);
  double recheck_min = std::numeric_limits<double>::infinity();
  double drift = 0.0;
  for (std::size_t i = 0; i < recheck.size(); ++i) {
    recheck_min = std::min(recheck_min, recheck[i]);
    drift = std::max(drift, std::abs(recheck[i] - rep.margins[i]));
  }
  o.report["recheck_min_margin"] = recheck_min;
  o.report["recheck_drift"] = drift;
  if (rep.success && !(recheck_min > 0.0)) {
    o.violation = true;
    o.messages.push_back("witness re-check failed: recomputed min margin " +
                         detail::format_double(recheck_min));
  }
  if (drift > 1e-9) {
    o.violation = true;
    o.messages.push_back("reported margins differ from recomputation by " + detail::format_double(drift));
  }
  for (std::size_t i = 0; i < rep.margins.size(); ++i) {
    o.records.push_back({{"index", i + 1}, {"margin", rep.margins[i]}});
  }
  return o;
}

Outcome cmd_coverage(const Config& c) {
  const Sequence s = load_sequence(c, vectors_source(c));
  const auto planks = planks_from_sequence(s.xs);
  const double radius = c.radius.empty() ? 1.0 : parse_number(c.radius, "--radius");
  const CoverageReport rep = coverage_mc(planks, s.space, radius, c.samples, c.seed);
  const BudgetSums budget = budget_sums(planks);
  Outcome o;
  o.report = io::to_json(rep);
  o.report["planks"] = planks.size();
  o.report["sum_widths"] = budget.sum_widths;
  o.report["sum_widths_sq"] = budget.sum_widths_sq;
  o.records.push_back({{"uncovered_fraction", rep.uncovered_fraction},
                       {"samples", rep.samples},
                       {"uncovered", rep.uncovered},
                       {"radius", rep.radius},
                       {"planks", planks.size()},
                       {"sum_widths", budget.sum_widths},
                       {"sum_widths_sq", budget.sum_widths_sq},
                       {"seed", rep.seed}});
  return o;
}

Outcome cmd_counterexample(const Config& c) {
  DemoOptions opt;
  opt.probes = c.probes;
  opt.seed = c.seed;
  opt.probe_scale = c.probe_scale;
  const DemoReport rep = counterexample_demo(require_family(c), require_n(c), opt);
  Outcome o;
  o.report = io::to_json(rep);
  if (!rep.all_probes_covered) {
    o.violation = true;
    o.messages.push_back("some probe is not covered by any cylinder");
  }
  if (!rep.no_probe_separates) {
    o.violation = true;
    o.messages.push_back("some probe separates the sequence from 0");
  }
  for (std::size_t i = 0; i < rep.probes.size(); ++i) {
    const auto& p = rep.probes[i];
    o.records.push_back({{"probe", i + 1},
                         {"covering_count", p.covering_indices.size()},
                         {"first_covering_index",
                          p.covering_indices.empty() ? json() : json(p.covering_indices.front())},
                         {"min_value", p.neighborhood.value},
                         {"min_index", p.neighborhood.index}});
  }
  return o;
}

Outcome cmd_cotype(const Config& c) {
  const Sequence s = load_sequence(c, vectors_source(c));
  const double p = c.p.empty() ? 2.0 : parse_number(c.p, "--p");
  CotypeOptions opt;
  opt.sampling = c.sampling;
  opt.samples = c.samples;
  opt.seed = c.seed;
  const CotypeReport rep = cotype_ratio(s.space, s.xs, p, opt);
  Outcome o;
  o.report = io::to_json(rep);
  std::string signs;
  for (int g : rep.pattern) signs += g > 0 ? '+' : '-';
  o.records.push_back({{"ratio", rep.ratio},
                       {"n", rep.n},
                       {"p", rep.p},
                       {"enumerated", rep.enumerated},
                       {"lower_bound", rep.lower_bound},
                       {"pattern", signs}});
  return o;
}

Outcome cmd_necessary(const Config& c) {
  const NecessaryReport rep = necessary_condition_check(require_family(c), exponents(c), require_n(c));
  Outcome o;
  o.report = io::to_json(rep);
  if (rep.consistency == Consistency::inconsistent) {
    o.violation = true;
    o.messages.push_back("partial sums contradict the analytic divergence verdict");
  }
  json r = o.report;
  o.records.push_back(std::move(r));
  return o;
}

Outcome dispatch(const Config& c) {
  if (c.subcommand == "validate") return cmd_validate(c);
  if (c.subcommand == "construct") return cmd_construct(c);
  if (c.subcommand == "transform") return cmd_transform(c);
  if (c.subcommand == "witness") return cmd_witness(c);
  if (c.subcommand == "coverage") return cmd_coverage(c);
  if (c.subcommand == "counterexample") return cmd_counterexample(c);
  if (c.subcommand == "cotype") return cmd_cotype(c);
  if (c.subcommand == "necessary") return cmd_necessary(c);
  throw InvalidInput("unknown subcommand '" + c.subcommand + "'");
}

void emit(const Config& c, const Outcome& o, std::ostream& out) {
  std::ostringstream body;
  if (c.format == "json") {
    json doc = o.report;
    doc["config"] = config_json(c);
    doc["version"] = version();
    doc["status"] = o.violation ? "violation" : "ok";
    body << io::canonical_dump(doc);
  } else {
    io::write_records_csv(body, o.records);
  }
  if (c.out.empty()) {
    out << body.str();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot open output '" + c.out + "'");
  f << body.str();
  if (!f) throw InvalidInput("write failed for output '" + c.out + "'");
}

void add_common(CLI::App* sub, Config& c) {
  sub->add_option("--family", c.family, "Norm family: power:c:alpha, powerlog:a:b, explicit:@file");
  sub->add_option("--space", c.space, "Space model, e.g. euclidean-real:2:64, lp:3:64, sup:inf:16");
  sub->add_option("--n", c.n, "Horizon N");
  sub->add_option("--p", c.p, "Exponent p (inf allowed)");
  sub->add_option("--p-prime", c.p_prime, "Dual exponent p'");
  sub->add_option("--seed", c.seed, "64-bit seed");
  sub->add_option("--budget", c.budget, "Objective evaluations per witness restart");
  sub->add_option("--samples", c.samples, "Monte Carlo samples or sampled sign patterns");
  sub->add_option("--radius", c.radius, "Ball radius");
  sub->add_option("--mode", c.mode, "construct mode: main or block");
  sub->add_option("--out", c.out, "Report path (stdout when absent)");
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--in", c.in, "Input file (weights for validate, vectors otherwise)");
  sub->add_option("--weights", c.weights, "Weight file to read (transform) or write (construct)");
  sub->add_option("--vectors", c.vectors, "Vector CSV to read, or to write for construct");
  sub->add_option("--sequence", c.sequence, "Scalar sequence file for transform");
  sub->add_option("--threshold", c.threshold, "Column-null, trend or plank threshold");
  sub->add_option("--row-tol", c.row_tol, "Row-sum tolerance");
  sub->add_option("--restarts", c.restarts, "Witness restarts");
  sub->add_option("--blocks", c.blocks, "Block count K");
  sub->add_option("--growth", c.growth, "Block growth target");
  sub->add_option("--rotate", c.rotate, "Apply a seeded random rotation");
  sub->add_option("--probes", c.probes, "Counterexample probes");
  sub->add_option("--probe-scale", c.probe_scale, "Component norm of each probe");
  sub->add_flag("--sampling", c.sampling, "Sample sign patterns instead of enumerating");
  sub->add_option("--basis", c.basis, "Use the basis functional e_i in transform");
}

}  // namespace

std::string version() { return PLANKFORGE_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Summability constructions and plank-covering experiments", "plankforge"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"validate", "Validate a weight-matrix file"},
      {"construct", "Build weights and vectors from a norm family"},
      {"transform", "Row transforms of a sequence or of |f(x_m)|^p'"},
      {"witness", "Search for a point outside every plank"},
      {"coverage", "Monte Carlo coverage of a ball by planks"},
      {"counterexample", "Cylinder counterexample with bounded cubic budget"},
      {"cotype", "Best sign combination ratio"},
      {"necessary", "Cross-check divergence of sum a_n^{-p'}"}};
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help), c);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("plankforge");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    const Outcome o = dispatch(c);
    emit(c, o, out);
    for (const auto& m : o.messages) err << "violation: " << m << "\n";
    return o.violation ? kExitViolation : kExitOk;
  } catch (const InvariantViolation& e) {
    err << "violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitUsage;
  }
}

}  // namespace plankforge::cli
