// SPDX-License-Identifier: Apache-2.0
#include "cepre/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cepre/errors.hpp"

namespace cepre {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + text + "'");
    items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  throw ConfigError("key '" + key + "': not a number: '" + text + "'");
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': not an integer: '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("key '" + key + "': out of range: '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "N",     "K",       "T",        "L",       "P",      "qam",       "snr",       "methods",
      "trials", "seed",   "workers",  "sigma",   "tol",    "max-iters", "accelerate", "restart",
      "init",  "out",     "trace",    "channel", "method", "sizes",     "noise-draws", "timing",
      "step",  "shrink",  "decrease", "backtracks", "patience",
      "mui-refit"};
  return keys;
}

std::string canonical_key(const std::string& key) {
  std::string k = trim(key);
  std::replace(k.begin(), k.end(), '_', '-');
  if (k.size() == 1) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(k[0])));
    if (u == 'N' || u == 'K' || u == 'T' || u == 'L' || u == 'P') return std::string(1, u);
  }
  if (k == "max-iter") k = "max-iters";
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), k) != keys.end() ? k : std::string{};
}

Settings parse_settings(std::istream& in, const std::string& source) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string raw_key = trim(line.substr(0, eq));
    const std::string key = canonical_key(raw_key);
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + raw_key + "'");
    if (out.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_settings(in, path);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double("list", item));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(parse_int("list", item));
  return out;
}

bool parse_bool(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

void apply_settings(RunSettings& run, const Settings& settings) {
  ExperimentConfig& e = run.experiment;
  for (const auto& [raw_key, value] : settings) {
    const std::string key = canonical_key(raw_key);
    if (key.empty()) throw ConfigError("unknown key '" + raw_key + "'");
    if (key == "N") e.N = parse_int(key, value);
    else if (key == "K") e.K = parse_int(key, value);
    else if (key == "T") e.T = parse_int(key, value);
    else if (key == "L") e.L = parse_int(key, value);
    else if (key == "qam") e.L = order_for_alphabet_size(parse_int(key, value));
    else if (key == "P") e.P = parse_double(key, value);
    else if (key == "snr") e.snr_db = parse_double_list(value);
    else if (key == "methods") {
      e.methods.clear();
      for (const auto& m : split_list(value)) e.methods.push_back(parse_method(m));
    } else if (key == "trials") e.trials = parse_int(key, value);
    else if (key == "seed") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw ConfigError("seed must be non-negative");
      e.seed = static_cast<std::uint64_t>(s);
    } else if (key == "workers") e.workers = parse_int(key, value);
    else if (key == "sigma") e.solver.sigma = parse_double(key, value);
    else if (key == "tol") e.solver.tol = e.mui.tol = parse_double(key, value);
    else if (key == "max-iters") e.solver.max_iters = e.mui.max_iters = parse_int(key, value);
    else if (key == "accelerate") {
      e.solver.accelerate = parse_bool(value);
      run.method = e.solver.accelerate ? Method::Fpg : Method::Pg;
    } else if (key == "restart") e.solver.restart_on_increase = parse_bool(value);
    else if (key == "init") e.solver.init = parse_init_kind(value);
    else if (key == "out") e.out = value;
    else if (key == "trace") run.trace_path = value;
    else if (key == "channel") run.channel_path = value;
    else if (key == "method") run.method = parse_method(value);
    else if (key == "sizes") run.sizes = parse_int_list(value);
    else if (key == "noise-draws") e.noise_draws = parse_int(key, value);
    else if (key == "timing") e.timing = parse_bool(value);
    else if (key == "step") e.solver.line_search.initial_step = e.mui.line_search.initial_step = parse_double(key, value);
    else if (key == "shrink") e.solver.line_search.shrink = e.mui.line_search.shrink = parse_double(key, value);
    else if (key == "decrease")
      e.solver.line_search.sufficient_decrease = e.mui.line_search.sufficient_decrease = parse_double(key, value);
    else if (key == "mui-refit") e.mui.refit_gain = parse_bool(value);
    else if (key == "patience") e.solver.patience = parse_int(key, value);
    else if (key == "backtracks")
      e.solver.line_search.max_backtracks = e.mui.line_search.max_backtracks = parse_int(key, value);
  }
}

}  // namespace cepre
