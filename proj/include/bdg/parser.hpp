#pragma once

#include <string>
#include <string_view>

#include "bdg/model.hpp"

namespace bdg {

/// Parses model text into a Model. Throws ParseError on any grammar
/// violation; structural problems beyond the grammar are left for
/// validate() to report.
Model parse_model(std::string_view text);

/// Renders a model in canonical form: two-space indentation, one entry
/// per line, names and parameter values quoted, fan-outs written as a
/// direct destination plus one Branch per extra destination. Parsing the
/// result yields the same Model. Throws InvalidModelError when
/// validate() finds violations.
std::string serialize_model(const Model& model);

} // namespace bdg
