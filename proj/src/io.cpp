#include "plankforge/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "plankforge/error.hpp"
#include "util.hpp"

namespace plankforge::io {

namespace {

void dump_value(std::ostream& out, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner_pad(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      // nlohmann::json objects are std::map backed, so iteration is key-sorted.
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << inner_pad << json(it.key()).dump() << ": ";
        dump_value(out, it.value(), indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      if (flat) {
        out << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << ", ";
          dump_value(out, v[i], indent + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",\n";
        out << inner_pad;
        dump_value(out, v[i], indent + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out << "null";
      } else {
        out << detail::format_double(d);
      }
      return;
    }
    default:
      out << v.dump();
      return;
  }
}

json exponent_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    return std::isfinite(d) ? detail::format_double(d) : "";
  }
  if (v.is_structured()) {
    std::ostringstream ss;
    dump_value(ss, v, 0);
    std::string s = ss.str();
    std::string flat;
    for (char c : s) {
      if (c != '\n') flat += c;
    }
    return csv_cell(json(flat));
  }
  return v.dump();
}

}  // namespace

std::string canonical_dump(const json& value) {
  std::ostringstream out;
  dump_value(out, value, 0);
  out << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Weights

void write_weights_text(std::ostream& out, const WeightMatrix& w, double tol) {
  out << "rows=" << w.rows() << " tol=" << detail::format_double(tol) << "\n";
  for (std::size_t n = 1; n <= w.rows(); ++n) {
    bool first = true;
    w.for_each_in_row(n, [&](std::size_t m, double p) {
      if (!first) out << ' ';
      first = false;
      out << m << ':' << detail::format_double(p);
    });
    out << "\n";
  }
}

WeightMatrix read_weights_text(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidInput("weights: missing header line");
  std::size_t rows = 0;
  bool have_rows = false;
  for (const auto& tok : detail::split(detail::trim(header), ' ')) {
    if (tok.rfind("rows=", 0) == 0) {
      rows = detail::parse_size(tok.substr(5), "weights header rows");
      have_rows = true;
    } else if (tok.rfind("tol=", 0) == 0) {
      (void)detail::parse_double(tok.substr(4), "weights header tol");
    } else if (!tok.empty()) {
      throw InvalidInput("weights header: unexpected field '" + tok + "'");
    }
  }
  if (!have_rows) throw InvalidInput("weights header must contain rows=<n>");
  std::vector<WeightMatrix::Row> out(rows);
  std::string line;
  for (std::size_t n = 0; n < rows; ++n) {
    if (!std::getline(in, line)) {
      throw InvalidInput("weights: header announces " + std::to_string(rows) + " rows, found " +
                         std::to_string(n));
    }
    for (const auto& tok : detail::split(detail::trim(line), ' ')) {
      if (tok.empty()) continue;
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw InvalidInput("weights row " + std::to_string(n + 1) + ": entry '" + tok +
                           "' is not m:weight");
      }
      out[n].push_back({detail::parse_size(tok.substr(0, colon), "weight column"),
                        detail::parse_double(tok.substr(colon + 1), "weight value")});
    }
  }
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) throw InvalidInput("weights: trailing data after the last row");
  }
  return WeightMatrix::from_rows(std::move(out));
}

json weights_to_json(const WeightMatrix& w) {
  json rows = json::array();
  for (std::size_t n = 1; n <= w.rows(); ++n) {
    json row = json::array();
    w.for_each_in_row(n, [&](std::size_t m, double p) { row.push_back(json::array({m, p})); });
    rows.push_back(std::move(row));
  }
  return rows;
}

WeightMatrix weights_from_json(const json& j) {
  const json& rows = j.is_object() && j.contains("weights") ? j.at("weights") : j;
  if (!rows.is_array()) throw InvalidInput("weights JSON must be an array of rows");
  std::vector<WeightMatrix::Row> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw InvalidInput("weights JSON row must be an array");
    WeightMatrix::Row r;
    for (const auto& e : row) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number()) {
        throw InvalidInput("weights JSON entries must be [m, weight] pairs");
      }
      r.push_back({e[0].get<std::size_t>(), e[1].get<double>()});
    }
    out.push_back(std::move(r));
  }
  return WeightMatrix::from_rows(std::move(out));
}

WeightMatrix read_weights_file(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw InvalidInput("weights JSON in '" + path + "': " + e.what());
    }
    return weights_from_json(j);
  }
  std::istringstream in(text);
  return read_weights_text(in);
}

// ---------------------------------------------------------------------------
// Vectors

json vector_to_json(const Vector& v) {
  json arr = json::array();
  if (v.space.is_complex()) {
    for (std::size_t i = 0; i < v.values.size(); i += 2) {
      arr.push_back(json::array({v.values[i], v.values[i + 1]}));
    }
  } else {
    for (double x : v.values) arr.push_back(x);
  }
  return arr;
}

void write_vectors_csv(std::ostream& out, std::span<const Vector> xs) {
  if (!xs.empty() && xs.front().space.is_complex()) out << "complex=true\n";
  for (const auto& x : xs) {
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      if (i) out << ',';
      out << detail::format_double(x.values[i]);
    }
    out << "\n";
  }
}

std::vector<Vector> read_vectors_csv(std::istream& in, const SpaceModel& space) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_complex = false;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (first && t.rfind("complex=", 0) == 0) {
      const std::string flag = t.substr(8);
      if (flag != "true" && flag != "false") throw InvalidInput("CSV header must be complex=true|false");
      header_complex = flag == "true";
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    for (const auto& field : detail::split(t, ',')) row.push_back(detail::parse_double(field, "vector entry"));
    rows.push_back(std::move(row));
  }
  if (header_complex && !space.is_complex()) {
    throw SpaceMismatch("vector CSV is complex but the model is " + space.descriptor());
  }
  SpaceModel target = space;
  if (target.dimension == 0) {
    if (rows.empty()) throw InvalidInput("vector CSV is empty; cannot infer the dimension");
    const std::size_t cols = rows.front().size();
    if (target.is_complex() && cols % 2 != 0) {
      throw InvalidInput("complex vector CSV needs an even number of columns");
    }
    target = target.with_dimension(target.is_complex() ? cols / 2 : cols);
  }
  std::vector<Vector> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != target.storage_size()) {
      throw InvalidInput("vector CSV row " + std::to_string(r + 1) + " has " +
                         std::to_string(rows[r].size()) + " columns, " + target.descriptor() +
                         " needs " + std::to_string(target.storage_size()));
    }
    out.push_back(Vector::from_values(target, std::move(rows[r])));
  }
  return out;
}

std::vector<Vector> read_vectors_file(const std::string& path, const SpaceModel& space) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open vector file '" + path + "'");
  return read_vectors_csv(in, space);
}

ScalarSequence read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open sequence file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& field : detail::split(line, ',')) {
      const std::string t = detail::trim(field);
      if (!t.empty()) values.push_back(detail::parse_double(t, "sequence value"));
    }
  }
  if (values.empty()) throw InvalidInput("sequence file '" + path + "' is empty");
  return ScalarSequence(std::move(values));
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const ValidationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"kind", to_string(v.kind)}, {"row", v.row}, {"column", v.column}, {"value", v.value}});
  }
  return {{"pass", r.pass},
          {"row_tol", r.row_tol},
          {"column_null_threshold", r.column_null_threshold},
          {"rows", r.row_sum_errors.size()},
          {"max_row_sum_error", r.max_row_sum_error},
          {"max_late_column_weight", r.max_late_column_weight},
          {"late_row", r.late_row},
          {"late_column", r.late_column},
          {"violations", std::move(violations)}};
}

json to_json(const TrendReport& r) {
  return {{"values", r.values},
          {"mid_row", r.mid_row},
          {"first_value", r.first_value},
          {"mid_value", r.mid_value},
          {"last_value", r.last_value},
          {"threshold", r.threshold},
          {"decision", r.decaying ? "decaying" : "not-decaying"}};
}

json to_json(const BlockPartition& part) {
  return {{"boundaries", part.boundaries}, {"sums", part.sums}, {"p_prime", part.p_prime}};
}

json to_json(const CoverageReport& r) {
  json pts = json::array();
  for (const auto& v : r.uncovered_points) pts.push_back(vector_to_json(v));
  return {{"uncovered_fraction", r.uncovered_fraction},
          {"samples", r.samples},
          {"uncovered", r.uncovered},
          {"uncovered_points", std::move(pts)},
          {"radius", r.radius},
          {"seed", r.seed}};
}

json to_json(const WitnessReport& r) {
  return {{"witness", vector_to_json(r.witness)},
          {"margins", r.margins},
          {"min_margin", r.min_margin},
          {"min_index", r.min_index},
          {"witness_norm", r.witness_norm},
          {"norm_radius", r.norm_radius},
          {"target_radius", r.target_radius},
          {"search_radius", r.search_radius},
          {"iterations", r.iterations},
          {"best_restart", r.best_restart},
          {"orthogonal_start", r.orthogonal_start},
          {"success", r.success},
          {"seed", r.seed},
          {"budget", r.budget}};
}

json to_json(const DemoReport& r) {
  json covering = json::array();
  json mins = json::array();
  for (const auto& p : r.probes) {
    covering.push_back(p.covering_indices);
    mins.push_back({{"value", p.neighborhood.value}, {"index", p.neighborhood.index}});
  }
  return {{"family", r.family},
          {"horizon", r.horizon},
          {"r3_partial_sum", r.r3_partial_sum},
          {"r3_tail_bound", r.r3_tail_bound ? json(*r.r3_tail_bound) : json()},
          {"a2_partial_sum", r.a2_partial_sum},
          {"covering_indices", std::move(covering)},
          {"probe_minima", std::move(mins)},
          {"all_probes_covered", r.all_probes_covered},
          {"no_probe_separates", r.no_probe_separates},
          {"seed", r.seed}};
}

json to_json(const CotypeReport& r) {
  return {{"ratio", r.ratio},
          {"pattern", r.pattern},
          {"n", r.n},
          {"p", exponent_json(r.p)},
          {"enumerated", r.enumerated},
          {"lower_bound", r.lower_bound},
          {"best_norm", r.best_norm},
          {"denominator", r.denominator}};
}

json to_json(const NecessaryReport& r) {
  json j = {{"horizon", r.horizon},
            {"p", exponent_json(r.exponents.p)},
            {"p_prime", r.exponents.p_prime},
            {"quarter", r.quarter},
            {"half", r.half},
            {"sum_quarter", r.sum_quarter},
            {"sum_half", r.sum_half},
            {"sum_full", r.sum_full},
            {"consistency", to_string(r.consistency)}};
  j["verdict"] = r.verdict ? json(to_string(*r.verdict)) : json();
  j["tail_half"] = r.tail_half ? json(*r.tail_half) : json();
  j["tail_quarter"] = r.tail_quarter ? json(*r.tail_quarter) : json();
  return j;
}

json to_json(const HolderCheck& h) {
  return {{"lhs", h.lhs},
          {"weighted_factor", h.weighted_factor},
          {"inverse_factor", h.inverse_factor},
          {"product", h.product},
          {"pass", h.pass}};
}

json to_json(const TransformBound& b) {
  return {{"lhs", b.lhs},
          {"rhs", b.rhs},
          {"constant", b.constant},
          {"measured_constant", b.measured_constant},
          {"holds", b.holds}};
}

void write_records_csv(std::ostream& out, const Records& records) {
  std::set<std::string> keys;
  for (const auto& r : records) {
    for (auto it = r.begin(); it != r.end(); ++it) keys.insert(it.key());
  }
  bool first = true;
  for (const auto& k : keys) {
    if (!first) out << ',';
    first = false;
    out << k;
  }
  out << "\n";
  for (const auto& r : records) {
    first = true;
    for (const auto& k : keys) {
      if (!first) out << ',';
      first = false;
      if (r.contains(k)) out << csv_cell(r.at(k));
    }
    out << "\n";
  }
}

}  // namespace plankforge::io
