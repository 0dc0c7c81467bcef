// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by the self-test and the test
// suites. Nothing here shares code with the estimators it checks.
#pragma once

#include <string>
#include <vector>

#include "jbfmc/model.hpp"
#include "jbfmc/types.hpp"

namespace jbfmc::oracles {

struct ScalarMoments {
  cplx mean;
  double var; // E|x - mean|^2
};

/// Posterior mean/variance of x with prior CN(0, prior_var) observed as
/// obs = x + CN(0, obs_var), by trapezoidal integration over the complex plane.
ScalarMoments posterior_by_quadrature(cplx obs, double obs_var, double prior_var);

/// Smallest ||col * c - target||_2 over c on a polar grid around `center`.
double best_scalar_on_grid(const ComplexVector &col, const ComplexVector &target, cplx center, int radial = 10,
                           int angular = 10);

/// Random matrix of exact rank r (product of Gaussian factors).
ComplexMatrix random_low_rank(model::Rng &rng, Eigen::Index rows, Eigen::Index cols, int r);

/// Bernoulli(p) mask.
Mask random_mask(model::Rng &rng, Eigen::Index rows, Eigen::Index cols, double p);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Fast oracle checks exposed by the CLI `selftest` subcommand.
std::vector<CheckResult> run_selftest();

} // namespace jbfmc::oracles
