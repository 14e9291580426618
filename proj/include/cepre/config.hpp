// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cepre/harness.hpp"

namespace cepre {

// Experiment manifest format: one `key = value` per line, `#` starts a
// comment, blank lines ignored. Keys are the long CLI flag names without the
// leading dashes (`max-iters`, `snr`, ...); `_` and `-` are interchangeable.
// Lists are comma separated.
using Settings = std::map<std::string, std::string>;

// Throws ConfigError naming the source and line on a malformed line or a
// repeated key.
Settings parse_settings(std::istream& in, const std::string& source);

// Throws ConfigError naming the path when it cannot be opened.
Settings load_settings(const std::string& path);

// Everything a CLI run needs beyond the sweep description.
struct RunSettings {
  ExperimentConfig experiment;
  std::vector<int> sizes{50, 100};  // bench antenna counts
  Method method = Method::Pg;       // solve-one
  std::string trace_path;
  std::string channel_path;
};

// Canonical key spelling, or empty when the key is not recognised.
std::string canonical_key(const std::string& key);
const std::vector<std::string>& known_keys();

// Applies settings in order: base then overrides. Unknown keys and
// unparsable values throw ConfigError.
void apply_settings(RunSettings& run, const Settings& settings);

std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
bool parse_bool(const std::string& text);

}  // namespace cepre
