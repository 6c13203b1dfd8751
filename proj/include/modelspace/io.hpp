#pragma once

// JSON documents for inner functions, measures and reports.
//
// Inner function:
//   {"blaschke_zeros": [{"re", "im", "mult"}], "singular_atoms": [{"angle", "mass"}],
//    "generator": {"name", "params": {...}, "truncation"}, "accumulation_angles": [...]}
// Measure:
//   {"atoms": [{"re", "im", "mass"}], "boundary_density": [{"start", "end", "density"}],
//    "clark": {"re", "im"}}
// The optional "clark" entry adds the Clark measure of the (finite) inner function.

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "modelspace/criteria.hpp"
#include "modelspace/spectral.hpp"

namespace modelspace {

using Json = nlohmann::ordered_json;

// Parses text, reporting syntax errors as ConfigError with line and column.
Json parse_json_text(const std::string& text, const std::string& source);

// Field errors are reported as ConfigError naming the JSON pointer of the field.
InnerFunction inner_from_json(const Json& doc, const std::string& path = "/inner");
DiscMeasure measure_from_json(const Json& doc, const InnerFunction& theta, const std::string& path = "/measure");

Json to_json(const InnerFunction& theta);
Json to_json(const DiscMeasure& mu);
Json to_json(const Witness& w);
Json to_json(const ConditionReport& rep);
Json to_json(const CriterionSum& sum);
Json to_json(const SpectralReport& rep);
Json gram_to_json(const Eigen::MatrixXcd& g);

std::uint64_t fnv1a64(std::string_view bytes);
// FNV-1a hash of the compact dump, as 16 hex digits.
std::string config_hash(const Json& config);

}  // namespace modelspace
