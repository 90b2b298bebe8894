#pragma once

#include <iosfwd>
#include <string>

#include "mcap/model.hpp"

// Scenario (de)serialization. One human-readable JSON document per scenario,
// units spelled out in the field names (bits, Hz, cycles/s, s, J). Numeric
// fields round-trip bit-exactly: doubles are emitted with shortest
// round-trip formatting and reparsed to the identical value.

namespace mcap {

void save_scenario(std::ostream& out, const Scenario& scenario);
void save_scenario(const std::string& path, const Scenario& scenario);

// Parses and validates. Throws std::runtime_error on malformed input and
// std::invalid_argument on structural invariant violations.
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

}  // namespace mcap
