// SPDX-License-Identifier: Apache-2.0
//
// End-to-end pipeline (factorization -> completion -> pseudo-inverse ->
// evaluation) and seeded Monte-Carlo sweeps over it.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jbfmc/config_io.hpp"
#include "jbfmc/eval.hpp"

namespace jbfmc::harness {

/// Genie prior parameters from the scenario statistics:
/// nu_g = K_g, nu_z = K_h M (unit-modulus steering, CN(0,1) gains and pilots).
bigamp::Priors priors_for(const model::SystemConfig &config, const ComplexMatrix &S);

/// One seeded trial; deterministic in (config, method, seed). Stage
/// failures become TrialResult::failed rather than exceptions; invalid
/// configurations still throw ConfigError.
eval::TrialResult run_trial(const ExperimentConfig &config, Method method, std::uint64_t seed);

struct SweepRow {
  std::string method;
  std::string axis1_name;
  double axis1 = 0.0;
  std::string axis2_name; // empty for single-axis sweeps
  double axis2 = 0.0;
  double nmse_g = 0.0;    // linear mean over non-failed trials (NaN if all failed)
  double nmse_h = 0.0;
  double fail_rate = 0.0;
  double iterations = 0.0;
  double wall_ms = 0.0;   // NaN when timing is not recorded

  bool operator==(const SweepRow &) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Seed of trial `trial` at grid point `point`.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial);

struct SweepOptions {
  int jobs = 1;
  bool record_timing = false; // wall time is the only nondeterministic column
};

SweepResult run_sweep(const SweepSpec &spec, const SweepOptions &opts = {});

inline constexpr const char *kCsvHeader =
    "method,axis1_name,axis1,axis2_name,axis2,nmse_g_db,nmse_h_db,fail_rate,iters,wall_ms";

/// Throws ConfigError on an empty result and Error on I/O failure.
void emit_csv(const SweepResult &result, const std::filesystem::path &path);
std::string format_csv(const SweepResult &result);

/// Inverse of format_csv; NMSE columns come back converted from dB.
SweepResult parse_csv(std::string_view text);

/// Line plot (NMSE in dB vs axis1) or, for two-axis sweeps, one heatmap per method and channel.
void emit_plot(const SweepResult &result, const std::filesystem::path &path);
std::string format_svg(const SweepResult &result);

} // namespace jbfmc::harness
