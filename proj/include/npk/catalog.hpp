#pragma once

#include "npk/homogeneous.hpp"

namespace npk {

struct Expected {
  std::string value;
  std::string source;  // "computed" (checked by a gate suite) or "closed-form"
};

struct CatalogEntry {
  std::string id;
  HomogeneousModel model;
  std::map<std::string, Expected> expected;
  std::string notes;  // normalization choices
  std::vector<std::string> gate;  // suites that must pass at load in CI
};

std::vector<std::string> builtin_ids();

// "builtin:<id>", a bare builtin id, or a path to a model file.
// Throws NotFound, ParseError and the validation errors.
CatalogEntry load_entry(const std::string& ref);
CatalogEntry load_builtin(const std::string& id);

std::vector<CatalogEntry> list_builtins();

// Exact structure constants of the span of the given matrices; throws
// ShapeMismatch if the span is not closed under commutators.
Tensor<Rational> structure_constants(const std::vector<Mat<Rational>>& basis);

Mat<Rational> killing_form(const Tensor<Rational>& c);

// Constants after replacing e_i by s_i e_i, given s_i^2. Each rescaled
// constant must be rational; throws IrrationalValue otherwise.
Tensor<Rational> rescale_basis(const Tensor<Rational>& c, const std::vector<Rational>& s_squared);

}  // namespace npk
