#pragma once

#include <filesystem>
#include <string>

#include "driveaudit/scenario.hpp"

namespace driveaudit {

// Canonical on-disk format: UTF-8 JSON with a fixed key order and floats
// rendered with 6 decimal places, so equal scenarios serialize to equal
// bytes. Agents' states are rows [x, y, heading, speed|null]; invalid
// frames are stored zeroed with a null speed.
inline constexpr int kFormatVersion = 1;

// Parses and validates one scenario file. Headings are wrapped into
// [-pi, pi), missing speeds filled from position differences, and the
// payload of invalid frames discarded. Throws ParseError on malformed
// JSON, SchemaError on missing/mistyped fields, InvariantError on
// structural violations; each carries a path to the offending element.
Scenario load_scenario(const std::filesystem::path& path);

// Same, reading from an in-memory document; `origin` names the source in
// error messages.
Scenario load_scenario_from_string(const std::string& text, const std::string& origin = "<string>");

// Serializes to the canonical byte layout. save(load(f)) == f for every
// file this writer produced.
std::string serialize_scenario(const Scenario& s);

void save_scenario(const Scenario& s, const std::filesystem::path& path);

}  // namespace driveaudit
