// SPDX-License-Identifier: Apache-2.0
//
// NMSE evaluation modulo the diagonal ambiguity (G Phi, Phi^{-1} H) that the
// cascaded model cannot resolve from observations.
#pragma once

#include <string>
#include <vector>

#include "jbfmc/model.hpp"
#include "jbfmc/types.hpp"

namespace jbfmc::eval {

struct Alignment {
  ComplexMatrix aligned;
  ComplexVector phi; // fitted scalars, 1 for all-zero estimate columns/rows
};

/// Per column n: phi_n = (g_hat_n^H g_n) / (g_hat_n^H g_hat_n), aligned column g_hat_n phi_n.
Alignment align_diagonal(const ComplexMatrix &G_hat, const ComplexMatrix &G);

/// Row-wise analogue for the Phi^{-1} side (H and Z).
Alignment align_rows(const ComplexMatrix &H_hat, const ComplexMatrix &H);

/// ||estimate - truth||_F^2 / ||truth||_F^2. Throws UndefinedMetricError on zero truth.
double nmse(const ComplexMatrix &estimate, const ComplexMatrix &truth);

double to_db(double linear);

struct AlignedEstimates {
  ComplexMatrix G_aligned;
  ComplexMatrix H_aligned;
  ComplexVector phi_g;
  ComplexVector phi_h;
};

AlignedEstimates align(const ComplexMatrix &G_hat, const ComplexMatrix &H_hat, const model::ChannelRealization &truth);

/// Raw pipeline output for one trial, before any comparison with the truth.
struct PipelineOutput {
  ComplexMatrix G_hat;
  ComplexMatrix Z_hat;
  ComplexMatrix H_hat;
  int bigamp_sweeps = 0;
  int bigamp_restarts = 0;
  bool bigamp_converged = false;
  std::vector<double> residual_history;
  int completion_iterations = 0;
  bool completion_converged = false;
  double wall_ms = 0.0;
};

struct TrialResult {
  bool failed = false;
  std::string failure_reason;
  double nmse_g = 1.0;
  double nmse_h = 1.0;
  double nmse_z = 1.0; // factorization output against S o (H X), before completion
  PipelineOutput output;
};

/// Aligns and scores one trial. Non-finite estimates mark the trial failed.
TrialResult evaluate_trial(const PipelineOutput &output, const model::ChannelRealization &truth,
                           const ComplexMatrix &Z_truth);

} // namespace jbfmc::eval
