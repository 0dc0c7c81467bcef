// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace jbfmc::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("config: value of '" + std::string(key) + "' is not a number: '" + std::string(text) + "'");
  return v;
}

int to_int(std::string_view key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError("config: value of '" + std::string(key) + "' must be an integer");
  return static_cast<int>(v);
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("config: value of '" + std::string(key) + "' is not an unsigned integer");
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError("config: value of '" + std::string(key) + "' is not a boolean");
}

using NumericSetter = void (*)(ExperimentConfig &, std::string_view, double);

const std::map<std::string, NumericSetter, std::less<>> &numeric_setters() {
  static const std::map<std::string, NumericSetter, std::less<>> setters = {
      {"num_bs_antennas", [](ExperimentConfig &c, std::string_view k, double v) { c.system.num_bs_antennas = to_int(k, v); }},
      {"num_surface_elements",
       [](ExperimentConfig &c, std::string_view k, double v) { c.system.num_surface_elements = to_int(k, v); }},
      {"num_rx_antennas", [](ExperimentConfig &c, std::string_view k, double v) { c.system.num_rx_antennas = to_int(k, v); }},
      {"pilot_length", [](ExperimentConfig &c, std::string_view k, double v) { c.system.pilot_length = to_int(k, v); }},
      {"sparsity_level", [](ExperimentConfig &c, std::string_view, double v) { c.system.sparsity_level = v; }},
      {"noise_power", [](ExperimentConfig &c, std::string_view, double v) { c.system.noise_power = v; }},
      {"snr_db",
       [](ExperimentConfig &c, std::string_view, double v) { c.system.noise_power = model::snr_db_to_noise_power(v); }},
      {"num_paths_h", [](ExperimentConfig &c, std::string_view k, double v) { c.system.num_paths_h = to_int(k, v); }},
      {"num_paths_g", [](ExperimentConfig &c, std::string_view k, double v) { c.system.num_paths_g = to_int(k, v); }},
      {"completion_rank", [](ExperimentConfig &c, std::string_view k, double v) { c.system.completion_rank = to_int(k, v); }},
      {"bigamp_max_restarts", [](ExperimentConfig &c, std::string_view k, double v) { c.bigamp.max_restarts = to_int(k, v); }},
      {"bigamp_max_sweeps", [](ExperimentConfig &c, std::string_view k, double v) { c.bigamp.max_sweeps = to_int(k, v); }},
      {"bigamp_tol", [](ExperimentConfig &c, std::string_view, double v) { c.bigamp.tol = v; }},
      {"bigamp_damping", [](ExperimentConfig &c, std::string_view, double v) { c.bigamp.damping = v; }},
      {"bigamp_restart_tol", [](ExperimentConfig &c, std::string_view, double v) { c.bigamp.restart_tol = v; }},
      {"completion_max_iters",
       [](ExperimentConfig &c, std::string_view k, double v) { c.completion.max_iters = to_int(k, v); }},
      {"completion_tol", [](ExperimentConfig &c, std::string_view, double v) { c.completion.tol = v; }},
      {"completion_step", [](ExperimentConfig &c, std::string_view, double v) { c.completion.step = v; }},
      {"ist_threshold", [](ExperimentConfig &c, std::string_view, double v) { c.completion.threshold = v; }},
  };
  return setters;
}

// Short symbols accepted as aliases.
std::string_view canonical(std::string_view key) {
  static const std::map<std::string, std::string, std::less<>> aliases = {
      {"M", "num_bs_antennas"}, {"N", "num_surface_elements"}, {"L", "num_rx_antennas"},
      {"T", "pilot_length"},    {"lambda", "sparsity_level"},  {"sigma2", "noise_power"},
      {"K_h", "num_paths_h"},   {"K_g", "num_paths_g"},         {"r", "completion_rank"},
      {"seed", "rng_seed"},
  };
  const auto it = aliases.find(key);
  return it == aliases.end() ? key : std::string_view(it->second);
}

} // namespace

std::string_view method_name(Method m) {
  switch (m) {
  case Method::JbfMc: return "jbf-mc";
  case Method::JbfIht: return "jbf-iht";
  case Method::JbfIst: return "jbf-ist";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  name = trim(name);
  if (name == "jbf-mc") return Method::JbfMc;
  if (name == "jbf-iht") return Method::JbfIht;
  if (name == "jbf-ist") return Method::JbfIst;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected jbf-mc, jbf-iht or jbf-ist)");
}

ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.system.num_bs_antennas = 16;
  c.system.num_surface_elements = 32;
  c.system.num_rx_antennas = 16;
  c.system.pilot_length = 128;
  c.system.sparsity_level = 0.2;
  c.system.noise_power = model::snr_db_to_noise_power(10.0);
  c.system.num_paths_h = 2;
  c.system.num_paths_g = 12;
  c.system.completion_rank = 2;
  return c;
}

ExperimentConfig full_profile() {
  ExperimentConfig c;
  c.system.num_bs_antennas = 64;
  c.system.num_surface_elements = 70;
  c.system.num_rx_antennas = 64;
  c.system.pilot_length = 300;
  c.system.sparsity_level = 0.2;
  c.system.noise_power = model::snr_db_to_noise_power(10.0);
  c.system.num_paths_h = 4;
  c.system.num_paths_g = 35;
  c.system.completion_rank = 35;
  return c;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_numeric_key(std::string_view key) { return numeric_setters().count(canonical(key)) > 0; }

void apply_numeric(ExperimentConfig &config, std::string_view key, double value) {
  const auto &setters = numeric_setters();
  const auto it = setters.find(canonical(key));
  if (it == setters.end()) throw ConfigError("config: '" + std::string(key) + "' is not a numeric setting");
  it->second(config, key, value);
}

void apply_setting(ExperimentConfig &config, std::string_view key, std::string_view value) {
  const std::string_view name = canonical(key);
  if (name == "rng_seed") {
    config.system.rng_seed = to_u64(key, value);
  } else if (name == "bigamp_jitter") {
    config.bigamp.jitter = to_bool(key, value);
  } else if (name == "completion_projection") {
    const auto v = trim(value);
    if (v == "tangent") config.completion.projection = completion::Projection::Tangent;
    else if (v == "left") config.completion.projection = completion::Projection::LeftSubspace;
    else throw ConfigError("config: completion_projection must be 'tangent' or 'left'");
  } else if (name == "profile") {
    const auto v = trim(value);
    const auto seed = config.system.rng_seed;
    if (v == "desk") config = desk_profile();
    else if (v == "full") config = full_profile();
    else throw ConfigError("config: unknown profile '" + std::string(v) + "'");
    config.system.rng_seed = seed;
  } else {
    apply_numeric(config, key, to_double(key, value));
  }
}

namespace {

// Profile first so later keys override it wherever it appears.
void apply_all(ExperimentConfig &config, const KeyValues &kv,
               const std::vector<std::string_view> &skip = {}) {
  for (const auto &[k, v] : kv)
    if (k == "profile") apply_setting(config, k, v);
  for (const auto &[k, v] : kv) {
    if (k == "profile") continue;
    if (std::find(skip.begin(), skip.end(), std::string_view(k)) != skip.end()) continue;
    apply_setting(config, k, v);
  }
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config = desk_profile();
  apply_all(config, parse_key_values(text));
  config.system.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) { return parse_config(read_text_file(path)); }

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) throw ConfigError("config: empty entry in number list");
    out.push_back(to_double("list", item));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

void SweepSpec::validate() const {
  base.system.validate();
  auto check_axis = [](const Axis &a) {
    if (!is_numeric_key(a.name)) throw ConfigError("sweep: axis '" + a.name + "' is not a numeric setting");
    if (a.values.empty()) throw ConfigError("sweep: axis '" + a.name + "' has no values");
    for (std::size_t i = 1; i < a.values.size(); ++i)
      if (!(a.values[i] > a.values[i - 1]))
        throw ConfigError("sweep: values of axis '" + a.name + "' must be strictly increasing");
  };
  check_axis(axis1);
  if (axis2) check_axis(*axis2);
  if (trials_per_point < 1) throw ConfigError("sweep: trials_per_point must be >= 1");
  if (methods.empty()) throw ConfigError("sweep: no methods selected");
  // Every grid point must yield a valid configuration.
  for (double v1 : axis1.values) {
    ExperimentConfig c = base;
    apply_numeric(c, axis1.name, v1);
    if (axis2) {
      for (double v2 : axis2->values) {
        ExperimentConfig c2 = c;
        apply_numeric(c2, axis2->name, v2);
        c2.system.validate();
      }
    } else {
      c.system.validate();
    }
  }
}

SweepSpec parse_sweep_spec(std::string_view text) {
  const KeyValues kv = parse_key_values(text);
  SweepSpec spec;
  spec.base = desk_profile();
  std::optional<std::string> a1, a2;
  std::optional<std::vector<double>> v1, v2;
  for (const auto &[k, v] : kv) {
    if (k == "axis1") a1 = std::string(trim(v));
    else if (k == "axis1_values") v1 = parse_number_list(v);
    else if (k == "axis2") a2 = std::string(trim(v));
    else if (k == "axis2_values") v2 = parse_number_list(v);
    else if (k == "trials_per_point") spec.trials_per_point = to_int(k, to_double(k, v));
    else if (k == "methods") {
      spec.methods.clear();
      std::string_view rest = v;
      while (true) {
        const auto comma = rest.find(',');
        spec.methods.push_back(parse_method(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
  }
  apply_all(spec.base, kv, {"axis1", "axis1_values", "axis2", "axis2_values", "trials_per_point", "methods"});
  if (!a1 || !v1) throw ConfigError("sweep: axis1 and axis1_values are required");
  spec.axis1 = {*a1, *v1};
  if (a2.has_value() != v2.has_value()) throw ConfigError("sweep: axis2 needs both a name and values");
  if (a2) spec.axis2 = Axis{*a2, *v2};
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path &path) { return parse_sweep_spec(read_text_file(path)); }

} // namespace jbfmc::harness
