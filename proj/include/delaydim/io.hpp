#pragma once

#include <string>

#include <json.hpp>

#include "delaydim/attractor.hpp"
#include "delaydim/bound.hpp"
#include "delaydim/geometry.hpp"
#include "delaydim/noise.hpp"
#include "delaydim/spectral.hpp"

namespace delaydim {

using Json = nlohmann::json;

/// Writes to `path.tmp.<pid>` in the same directory and renames over `path`,
/// so readers never observe a partial file. Parent directories are created.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Pretty-printed JSON with a trailing newline; key order is sorted, so equal
/// reports are byte-identical.
std::string render(const Json& j);

Json to_json(const SpectralModel& model);
Json to_json(const BoundInputs& inputs);
Json to_json(const ConditionResult& c);
Json to_json(const BoundReport& report);
Json to_json(const ErgodicAverages& e);
Json to_json(const CoverResult& c, bool with_centers);
Json to_json(const DimensionEstimate& d);
Json to_json(const SqueezeReport& s);
Json cloud_metadata(const PointCloud& cloud);

/// Reads the fields of BoundInputs; missing fields keep their defaults except
/// K, M, rho1, rhom, k_m, which are required.
BoundInputs bound_inputs_from_json(const Json& j);

/// "# " prefixed JSON header lines followed by a CSV table.
std::string csv_header_block(const Json& header);
std::string format_double(double v);

/// Columns t, z_1..z_m, r; every `stride`-th row.
std::string ou_csv(const OUProcessPath& z, const Json& header, std::size_t stride = 1);

/// Binary cloud: u64 dim, u64 count (little endian), then count*dim doubles.
/// The JSON sidecar holds cloud_metadata plus the keys of `extra`.
void write_cloud(const std::string& path, const PointCloud& cloud, const Json& extra = Json::object());
/// Reads the binary payload and the JSON sidecar written next to it.
PointCloud read_cloud(const std::string& path);
std::string sidecar_path(const std::string& cloud_path);

}  // namespace delaydim
