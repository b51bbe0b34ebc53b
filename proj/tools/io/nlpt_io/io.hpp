#pragma once

#include "nlpt/fieldlab.hpp"
#include "nlpt/operators.hpp"
#include "nlpt/slag.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace nlpt::io {

using nlohmann::json;

// Grid files: {"dims", "lower", "upper", "resolution", "encoding": "base64" | "inline", "data", "mask"?}.
// base64 data holds row-major little-endian float64; the optional mask holds one byte per node.
// Malformed input throws InputError.
json grid_to_json(const GridFunction& u, bool inline_values = false);
GridFunction grid_from_json(const json& doc);
GridFunction read_grid(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const GridFunction& u);

std::string base64_encode(const void* data, std::size_t bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

// Operator specs: {"kind", "label"?, "dim", "domain": {"lower", "upper", "margin"?},
//  "coefficients": {name: {"grid_shape", "values"} | {"constant"}}, "params": {scalars..., "profile"?}}.
// Coefficient grids span the operator domain; the component count is values / prod(grid_shape).
OperatorSpec operator_from_json(const json& doc);
OperatorSpec read_operator_spec(const std::filesystem::path& path);
json operator_params_to_json(const std::string& kind, const std::string& label, const OperatorParams& params);

json parse_json_file(const std::filesystem::path& path);
/// Two-space indented, keys sorted, trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);

json to_json(const Jet& j);
json to_json(const ContinuityWitness& w);
json to_json(const ContinuityCertificate& c);
json to_json(const PairWitness& w);
json to_json(const PairCertificate& c);
json to_json(const CorrespondenceReport& r);
json to_json(const FailureWitness& w);
json to_json(const SlagCertificate& c);
json to_json(const GridReport& r);
json to_json(const ComparisonVerdict& v);

}  // namespace nlpt::io
