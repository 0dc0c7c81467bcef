// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/eval.hpp"

#include <cmath>

namespace jbfmc::eval {

Alignment align_diagonal(const ComplexMatrix &G_hat, const ComplexMatrix &G) {
  require_same_shape(G_hat, G, "align_diagonal");
  Alignment out{G_hat, ComplexVector::Ones(G.cols())};
  for (Eigen::Index n = 0; n < G.cols(); ++n) {
    const double energy = G_hat.col(n).squaredNorm();
    if (energy == 0.0) continue;
    out.phi(n) = G_hat.col(n).dot(G.col(n)) / energy; // dot conjugates the left operand
    out.aligned.col(n) = G_hat.col(n) * out.phi(n);
  }
  return out;
}

Alignment align_rows(const ComplexMatrix &H_hat, const ComplexMatrix &H) {
  require_same_shape(H_hat, H, "align_rows");
  Alignment t = align_diagonal(H_hat.transpose(), H.transpose());
  return {t.aligned.transpose(), t.phi};
}

double nmse(const ComplexMatrix &estimate, const ComplexMatrix &truth) {
  require_same_shape(estimate, truth, "nmse");
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) throw UndefinedMetricError("nmse: reference matrix has zero norm");
  return (estimate - truth).squaredNorm() / denom;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

AlignedEstimates align(const ComplexMatrix &G_hat, const ComplexMatrix &H_hat, const model::ChannelRealization &truth) {
  Alignment g = align_diagonal(G_hat, truth.G);
  Alignment h = align_rows(H_hat, truth.H);
  return {std::move(g.aligned), std::move(h.aligned), std::move(g.phi), std::move(h.phi)};
}

TrialResult evaluate_trial(const PipelineOutput &output, const model::ChannelRealization &truth,
                           const ComplexMatrix &Z_truth) {
  TrialResult r;
  r.output = output;
  if (!all_finite(output.G_hat) || !all_finite(output.H_hat) || !all_finite(output.Z_hat)) {
    r.failed = true;
    r.failure_reason = "non-finite estimate";
    return r;
  }
  const AlignedEstimates a = align(output.G_hat, output.H_hat, truth);
  r.nmse_g = nmse(a.G_aligned, truth.G);
  r.nmse_h = nmse(a.H_aligned, truth.H);
  r.nmse_z = Z_truth.squaredNorm() > 0.0 ? nmse(align_rows(output.Z_hat, Z_truth).aligned, Z_truth) : 0.0;
  return r;
}

} // namespace jbfmc::eval
