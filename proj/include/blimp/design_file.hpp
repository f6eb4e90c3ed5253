#pragma once

#include <string>
#include <string_view>

#include "blimp/design.hpp"
#include "blimp/kvdoc.hpp"

namespace blimp {

/// Parses and validates a design file. Thrust bounds are read in
/// grams-force (`thrust_range_g`) and stored in newtons; length keys accept
/// an `_mm` suffix and mass keys a `_g` suffix.
///
/// Throws DesignError (syntax, schema or invariant kind).
DesignSpec parse_design(std::string_view text);

/// Maps an already-parsed document onto the design schema.
DesignSpec design_from_document(const kv::Document& doc);

/// Canonical design file text: SI lengths and kilogram masses, thrust in
/// grams-force.
std::string serialize_design(const DesignSpec& design);

} // namespace blimp
