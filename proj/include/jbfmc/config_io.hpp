// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` configuration files. Lists are comma separated, `#`
// starts a comment. Every SystemConfig field and the solver knobs are
// addressable by name; `profile = desk|full` loads a preset first.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jbfmc/bigamp.hpp"
#include "jbfmc/completion.hpp"
#include "jbfmc/model.hpp"

namespace jbfmc::harness {

enum class Method { JbfMc, JbfIht, JbfIst };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  model::SystemConfig system;
  bigamp::Options bigamp;
  completion::Options completion;
};

/// N=32, M=L=16, T=128, lambda=0.2, K_h=2; sized for quick sweeps.
ExperimentConfig desk_profile();
/// N=70, M=L=64, T=300, lambda=0.2, K_h=4, K_g=r=35.
ExperimentConfig full_profile();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits text into ordered key/value pairs. Throws ConfigError on malformed lines.
KeyValues parse_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path &path);

/// Applies one setting; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig &config, std::string_view key, std::string_view value);

/// Numeric setter used by sweep axes (integer keys require integral values).
void apply_numeric(ExperimentConfig &config, std::string_view key, double value);

bool is_numeric_key(std::string_view key);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  ExperimentConfig base;
  Axis axis1;
  std::optional<Axis> axis2;
  int trials_per_point = 1;
  std::vector<Method> methods{Method::JbfMc};

  void validate() const;
};

SweepSpec parse_sweep_spec(std::string_view text);
SweepSpec load_sweep_spec(const std::filesystem::path &path);

std::vector<double> parse_number_list(std::string_view text);

} // namespace jbfmc::harness
