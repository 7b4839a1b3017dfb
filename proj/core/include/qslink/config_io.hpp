#pragma once

#include <string>

#include "qslink/config.hpp"

namespace qslink {

// Parses the `key = value` scenario format: one key per line, keys named
// exactly as the SystemConfig fields, optional unit suffixes on lengths
// (km, m, cm, mm, um, nm) and times (s, ms, us, ns, ps), '#' comments,
// blank lines ignored.
// Unknown keys, malformed values, and violated invariants raise config_error
// with the offending line number. Absent keys keep their defaults.
SystemConfig parse_config(const std::string& text);

// Reads a file and parses it; throws config_error if unreadable.
SystemConfig parse_config_file(const std::string& path);

// Applies one "key=value" override (same syntax as a config line).
void apply_override(SystemConfig& cfg, const std::string& assignment);

} // namespace qslink
