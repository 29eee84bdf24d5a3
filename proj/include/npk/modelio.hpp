#pragma once

#include <json.hpp>

#include "npk/catalog.hpp"
#include "npk/threeform.hpp"

namespace npk {

using Json = nlohmann::json;

// Throws NotFound or ParseError.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// "model", "curvature_point" or "threeform"; throws MissingField.
std::string file_kind(const Json& j);

// True when every number in the document is an integer or a rational string.
bool json_is_exact(const Json& j);

CatalogEntry entry_from_json(const Json& j);
Json entry_to_json(const CatalogEntry& e);

// Exact values are written as "p/q" strings, doubles as JSON numbers; both
// round-trip bit for bit.
template <class F>
CurvaturePoint<F> point_from_json(const Json& j);
template <class F>
Json point_to_json(const CurvaturePoint<F>& cp);

// Either "assignments" extended by type in an adapted frame with signs "eps",
// or full "components" with a "metric".
template <class F>
ThreeForm<F> threeform_from_json(const Json& j);
template <class F>
Json threeform_to_json(const ThreeForm<F>& t);

template <class F>
F scalar_from_json(const Json& v);
template <class F>
Json scalar_to_json(const F& x);

}  // namespace npk
