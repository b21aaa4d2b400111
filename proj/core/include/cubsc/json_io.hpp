#pragma once

#include <string>

#include <json.hpp>

#include "cubsc/complex.hpp"
#include "cubsc/result.hpp"

namespace cubsc {

/// Complex document schema: {"cubes": [[...], ...], "dim": d, "labels": [...]}.
/// cubes is one array per dimension; each cube is its face-id array indexed
/// 2*axis+side (vertices are []). labels mirrors cubes with strings and is
/// omitted when every label is empty. Keys serialize alphabetically, so
/// parse -> serialize of a canonical document is byte-identical.
nlohmann::json complex_to_json(const CubeComplex& X);

/// Errors: ParseError (schema violations) plus everything validate_complex
/// reports.
Result<CubeComplex> complex_from_json(const nlohmann::json& doc);

/// Canonical rendering: two-space indent, sorted keys, trailing newline.
std::string canonical_json(const nlohmann::json& doc);

Result<CubeComplex> read_complex_file(const std::string& path);
void write_complex_file(const std::string& path, const CubeComplex& X);

}  // namespace cubsc
