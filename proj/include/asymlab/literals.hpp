#pragma once

#include "asymlab/gf2_dual.hpp"
#include "asymlab/ledrappier.hpp"

#include <string>

namespace asym {

/// "character: [(e1,e2),...]" or "cylinder: [((z1,z2),bit),...]".
SetSpec parse_set_spec(const std::string& text);

/// "(t,s)".
Exponent parse_shift(const std::string& text);

std::string format_set_spec(const SetSpec& spec);

}  // namespace asym
