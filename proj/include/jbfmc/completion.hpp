// SPDX-License-Identifier: Apache-2.0
//
// Rank-constrained matrix completion of the factorization output, plus the
// pseudo-inverse step that maps the completed matrix back to H.
#pragma once

#include <optional>
#include <vector>

#include "jbfmc/types.hpp"

namespace jbfmc::completion {

struct CompletionProblem {
  ComplexMatrix observed; // N x T, zero off the mask, surface phases removed
  Mask mask;              // N x T
  int rank = 1;

  void validate() const;
};

/// Builds a problem from a factorization output and the complex surface
/// pattern S; entries are multiplied by conj(S) so unit-modulus phases drop out.
CompletionProblem make_problem(const ComplexMatrix &Z_hat, const ComplexMatrix &S, int rank);

struct CompletionResult {
  ComplexMatrix A;
  int iterations_used = 0;
  std::vector<double> objective_history; // 0.5 ||P_mask(A - observed)||_F^2 after each iteration
  bool converged = false;
};

struct TruncatedSvd {
  ComplexMatrix U; // rows x k
  RealVector s;    // k, descending
  ComplexMatrix V; // cols x k
};

/// Leading k singular triplets (k <= min dims). Ties keep the ordering of the
/// underlying full SVD.
TruncatedSvd truncated_svd(const ComplexMatrix &W, int k);

/// Best rank-r approximation U Sigma_r V^H.
ComplexMatrix hard_threshold(const ComplexMatrix &W, int r);

/// U max(Sigma - tau, 0) V^H.
ComplexMatrix soft_threshold(const ComplexMatrix &W, double tau);

/// U_r U_r^H Q with U_r the leading r left singular vectors of A_k. A zero
/// A_k has no singular subspace; the identity is used then.
ComplexMatrix project_subspace(const ComplexMatrix &Q, const ComplexMatrix &A_k, int r);

/// Projection onto the tangent space of the rank-r manifold at A_k:
/// U U^H Q + Q V V^H - U U^H Q V V^H. Identity for a zero A_k.
ComplexMatrix project_tangent(const ComplexMatrix &Q, const ComplexMatrix &A_k, int r);

enum class Projection {
  Tangent,      // row and column space (converging variant)
  LeftSubspace, // column space only
};

double objective(const ComplexMatrix &A, const CompletionProblem &problem);

struct StepInfo {
  double alpha = 1.0;
};

/// One Riemannian gradient step: masked residual, projection, exact step
/// size, rank-r hard threshold.
ComplexMatrix rgrad_step(const ComplexMatrix &A_k, const CompletionProblem &problem,
                         Projection projection = Projection::Tangent, StepInfo *info = nullptr);

struct Options {
  int max_iters = 500;
  double tol = 1e-10; // relative objective change
  Projection projection = Projection::Tangent;
  double step = 1.0;                 // IHT / IST step size
  std::optional<double> threshold;   // IST tau; default sigma_{r+1} of the first iterate
};

CompletionResult run_rgrad(const CompletionProblem &problem, const Options &opts = {});

/// A <- H_r(A + step * P_mask(observed - A)).
CompletionResult run_iht(const CompletionProblem &problem, const Options &opts = {});

/// A <- H_r(SVT_tau(A + step * P_mask(observed - A))).
CompletionResult run_ist(const CompletionProblem &problem, const Options &opts = {});

/// H = A X^H (X X^H)^{-1}; throws NumericalError unless X has full row rank.
ComplexMatrix recover_H(const ComplexMatrix &A, const ComplexMatrix &X);

} // namespace jbfmc::completion
