#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "plankforge/constructions.hpp"
#include "plankforge/cotype.hpp"
#include "plankforge/plank.hpp"
#include "plankforge/space.hpp"
#include "plankforge/summability.hpp"

namespace plankforge::io {

using nlohmann::json;

/// Canonical JSON: keys sorted, numbers as %.17g, non-finite numbers as null,
/// two-space indentation and a trailing newline.
std::string canonical_dump(const json& value);

// Weight matrices -----------------------------------------------------------

/// Header `rows=<n> tol=<t>`, then one line per row of `m:weight` entries.
void write_weights_text(std::ostream& out, const WeightMatrix& w, double tol);
WeightMatrix read_weights_text(std::istream& in);
/// Array of rows, each an array of [m, weight] pairs.
json weights_to_json(const WeightMatrix& w);
WeightMatrix weights_from_json(const json& j);
/// Reads either format, deciding by the first non-blank character.
WeightMatrix read_weights_file(const std::string& path);

// Vectors -------------------------------------------------------------------

json vector_to_json(const Vector& v);
/// One vector per row; complex models write `complex=true` as a header and
/// alternate re,im columns.
void write_vectors_csv(std::ostream& out, std::span<const Vector> xs);
/// Reads vectors into `space` (dimension taken from the column count when
/// `space.dimension` is 0). An optional `complex=true|false` header line selects
/// the layout; a complex header requires a complex model.
std::vector<Vector> read_vectors_csv(std::istream& in, const SpaceModel& space);
std::vector<Vector> read_vectors_file(const std::string& path, const SpaceModel& space);
/// Comma- or newline-separated reals.
ScalarSequence read_sequence_file(const std::string& path);

// Reports -------------------------------------------------------------------

json to_json(const ValidationReport& r);
json to_json(const TrendReport& r);
json to_json(const BlockPartition& part);
json to_json(const CoverageReport& r);
json to_json(const WitnessReport& r);
json to_json(const DemoReport& r);
json to_json(const CotypeReport& r);
json to_json(const NecessaryReport& r);
json to_json(const HolderCheck& h);
json to_json(const TransformBound& b);

/// Flattened rows for CSV output; one object per record.
using Records = std::vector<json>;

/// One CSV line per record after a header of the sorted union of keys.
void write_records_csv(std::ostream& out, const Records& records);

}  // namespace plankforge::io
