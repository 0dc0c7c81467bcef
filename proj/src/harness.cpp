// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace jbfmc::harness {

bigamp::Priors priors_for(const model::SystemConfig &config, const ComplexMatrix &S) {
  bigamp::Priors p;
  p.nu_g = static_cast<double>(config.num_paths_g);
  p.nu_z = static_cast<double>(config.num_paths_h) * config.num_bs_antennas;
  p.noise_var = config.noise_power;
  p.sparsity_level = config.sparsity_level;
  p.support = support_of(S);
  return p;
}

namespace {

completion::CompletionResult complete(Method method, const completion::CompletionProblem &problem,
                                      const completion::Options &opts) {
  switch (method) {
  case Method::JbfMc: return completion::run_rgrad(problem, opts);
  case Method::JbfIht: return completion::run_iht(problem, opts);
  case Method::JbfIst: return completion::run_ist(problem, opts);
  }
  throw ConfigError("unknown method");
}

eval::TrialResult failed_trial(std::string reason, eval::PipelineOutput out = {}) {
  eval::TrialResult r;
  r.failed = true;
  r.failure_reason = std::move(reason);
  r.output = std::move(out);
  return r;
}

} // namespace

eval::TrialResult run_trial(const ExperimentConfig &config, Method method, std::uint64_t seed) {
  config.system.validate();
  const auto start = std::chrono::steady_clock::now();
  model::RngStreams rng(seed);
  const model::ChannelRealization channels = model::draw_channels(config.system, rng.channel);
  const model::PilotSet pilots = model::draw_pilots(config.system, rng.pilot);
  const model::Observation obs = model::synthesize(channels, pilots, config.system.noise_power, rng.noise);

  if ((pilots.S.array() == cplx(0.0, 0.0)).all()) return failed_trial("no active surface elements");

  eval::PipelineOutput out;
  try {
    const bigamp::Priors priors = priors_for(config.system, pilots.S);
    const bigamp::FactorizationResult fact = bigamp::run(obs.Y, priors, config.bigamp, rng.algorithm);
    out.G_hat = fact.G;
    out.Z_hat = fact.Z;
    out.bigamp_sweeps = fact.iterations_used;
    out.bigamp_restarts = fact.restarts_used;
    out.bigamp_converged = fact.converged;
    out.residual_history = fact.residual_history;
    if (out.Z_hat.norm() == 0.0 || out.G_hat.norm() == 0.0) return failed_trial("degenerate factorization", out);

    const completion::CompletionProblem problem =
        completion::make_problem(out.Z_hat, pilots.S, config.system.completion_rank);
    const completion::CompletionResult done = complete(method, problem, config.completion);
    out.completion_iterations = done.iterations_used;
    out.completion_converged = done.converged;
    out.H_hat = completion::recover_H(done.A, pilots.X);
  } catch (const NumericalError &e) {
    return failed_trial(e.what(), out);
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return eval::evaluate_trial(out, channels, obs.Z);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial) {
  return model::derive_seed(master, point + 1, trial + 1);
}

SweepResult run_sweep(const SweepSpec &spec, const SweepOptions &opts) {
  spec.validate();
  if (opts.jobs < 1) throw ConfigError("sweep: jobs must be >= 1");

  struct Point {
    ExperimentConfig config;
    double v1;
    double v2;
  };
  std::vector<Point> points;
  for (double v1 : spec.axis1.values) {
    if (spec.axis2) {
      for (double v2 : spec.axis2->values) {
        Point p{spec.base, v1, v2};
        apply_numeric(p.config, spec.axis1.name, v1);
        apply_numeric(p.config, spec.axis2->name, v2);
        points.push_back(std::move(p));
      }
    } else {
      Point p{spec.base, v1, 0.0};
      apply_numeric(p.config, spec.axis1.name, v1);
      points.push_back(std::move(p));
    }
  }

  const std::size_t trials = static_cast<std::size_t>(spec.trials_per_point);
  const std::size_t per_method = points.size() * trials;
  const std::size_t total = spec.methods.size() * per_method;
  std::vector<eval::TrialResult> results(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t m = i / per_method;
      const std::size_t p = (i % per_method) / trials;
      const std::size_t t = i % trials;
      // Seeds do not depend on the method: all methods see the same draws.
      results[i] = run_trial(points[p].config, spec.methods[m], trial_seed(spec.base.system.rng_seed, p, t));
    }
  };
  const int jobs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), total));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  SweepResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      double g = 0.0, h = 0.0, iters = 0.0, wall = 0.0;
      std::size_t ok = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const eval::TrialResult &r = results[m * per_method + p * trials + t];
        wall += r.output.wall_ms;
        if (r.failed) continue;
        ++ok;
        g += r.nmse_g;
        h += r.nmse_h;
        iters += r.output.completion_iterations;
      }
      SweepRow row;
      row.method = std::string(method_name(spec.methods[m]));
      row.axis1_name = spec.axis1.name;
      row.axis1 = points[p].v1;
      if (spec.axis2) {
        row.axis2_name = spec.axis2->name;
        row.axis2 = points[p].v2;
      }
      row.nmse_g = ok ? g / ok : nan;
      row.nmse_h = ok ? h / ok : nan;
      row.iterations = ok ? iters / ok : nan;
      row.fail_rate = 1.0 - static_cast<double>(ok) / static_cast<double>(trials);
      row.wall_ms = opts.record_timing ? wall / trials : nan;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

} // namespace jbfmc::harness
