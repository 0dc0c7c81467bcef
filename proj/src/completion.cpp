// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/completion.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace jbfmc::completion {

namespace {

ComplexMatrix masked(const ComplexMatrix &M, const Mask &mask) {
  return mask.select(M, ComplexMatrix::Zero(M.rows(), M.cols()));
}

double masked_sq_norm(const ComplexMatrix &M, const Mask &mask) {
  return mask.select(M.cwiseAbs2(), RealMatrix::Zero(M.rows(), M.cols())).sum();
}

void check_rank(int r, const ComplexMatrix &W, const char *what) {
  if (r < 1 || r > std::min(W.rows(), W.cols()))
    throw ConfigError(std::string(what) + ": rank " + std::to_string(r) + " outside [1, min(dims)]");
}

// Records the objective and decides whether to stop.
bool record(CompletionResult &res, double f, double tol, double scale) {
  const double prev = res.objective_history.empty() ? -1.0 : res.objective_history.back();
  res.objective_history.push_back(f);
  ++res.iterations_used;
  if (f <= 1e-28 * scale) return true;
  if (prev > 0.0 && std::abs(prev - f) <= tol * prev) return true;
  return false;
}

} // namespace

void CompletionProblem::validate() const {
  if (observed.rows() != mask.rows() || observed.cols() != mask.cols())
    throw ConfigError("completion: observed matrix and mask disagree in shape");
  if (rank < 1 || rank > std::min(observed.rows(), observed.cols()))
    throw ConfigError("completion: rank must lie in [1, min(N, T)]");
  if (!all_finite(observed)) throw NumericalError("completion: observed matrix is not finite");
}

CompletionProblem make_problem(const ComplexMatrix &Z_hat, const ComplexMatrix &S, int rank) {
  require_same_shape(Z_hat, S, "make_problem");
  CompletionProblem p;
  p.mask = support_of(S);
  p.observed = p.mask.select(S.conjugate().cwiseProduct(Z_hat), ComplexMatrix::Zero(S.rows(), S.cols()));
  p.rank = rank;
  p.validate();
  return p;
}

TruncatedSvd truncated_svd(const ComplexMatrix &W, int k) {
  check_rank(k, W, "truncated_svd");
  Eigen::BDCSVD<ComplexMatrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("truncated_svd: SVD did not converge");
  return {svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

ComplexMatrix hard_threshold(const ComplexMatrix &W, int r) {
  const TruncatedSvd t = truncated_svd(W, r);
  return t.U * t.s.cast<cplx>().asDiagonal() * t.V.adjoint();
}

ComplexMatrix soft_threshold(const ComplexMatrix &W, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("soft_threshold: tau must be >= 0");
  Eigen::BDCSVD<ComplexMatrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("soft_threshold: SVD did not converge");
  const RealVector s = (svd.singularValues().array() - tau).cwiseMax(0.0).matrix();
  return svd.matrixU() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
}

ComplexMatrix project_subspace(const ComplexMatrix &Q, const ComplexMatrix &A_k, int r) {
  require_same_shape(Q, A_k, "project_subspace");
  if (A_k.norm() == 0.0) return Q;
  const TruncatedSvd t = truncated_svd(A_k, r);
  return t.U * (t.U.adjoint() * Q);
}

ComplexMatrix project_tangent(const ComplexMatrix &Q, const ComplexMatrix &A_k, int r) {
  require_same_shape(Q, A_k, "project_tangent");
  if (A_k.norm() == 0.0) return Q;
  const TruncatedSvd t = truncated_svd(A_k, r);
  const ComplexMatrix UhQ = t.U.adjoint() * Q;
  const ComplexMatrix QV = Q * t.V;
  return t.U * UhQ + QV * t.V.adjoint() - t.U * (UhQ * t.V) * t.V.adjoint();
}

double objective(const ComplexMatrix &A, const CompletionProblem &problem) {
  require_same_shape(A, problem.observed, "objective");
  return 0.5 * masked_sq_norm(A - problem.observed, problem.mask);
}

ComplexMatrix rgrad_step(const ComplexMatrix &A_k, const CompletionProblem &problem, Projection projection,
                         StepInfo *info) {
  problem.validate();
  require_same_shape(A_k, problem.observed, "rgrad_step");
  const ComplexMatrix Q = masked(problem.observed - A_k, problem.mask);
  const ComplexMatrix PQ = projection == Projection::Tangent ? project_tangent(Q, A_k, problem.rank)
                                                             : project_subspace(Q, A_k, problem.rank);
  const double num = PQ.squaredNorm();
  const double den = masked_sq_norm(PQ, problem.mask);
  const double alpha = den > 0.0 ? num / den : 1.0;
  if (info != nullptr) info->alpha = alpha;
  return hard_threshold(A_k + alpha * PQ, problem.rank);
}

namespace {

// Tangent-space iteration kept in factored form A = U diag(s) V^H. The
// update A + alpha P_T(Q) has rank <= 2r and its SVD comes from a 2r x 2r
// core. Only observed entries of A are ever evaluated, so a sweep costs
// O(|mask| r + (N + T) r^2).
CompletionResult run_rgrad_factored(const CompletionProblem &problem, const Options &opts) {
  const int r = problem.rank;
  const Eigen::Index rows = problem.observed.rows(), cols = problem.observed.cols();

  std::vector<Eigen::Index> oi, oj;
  std::vector<cplx> ov;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      if (problem.mask(i, j)) {
        oi.push_back(i);
        oj.push_back(j);
        ov.push_back(problem.observed(i, j));
      }
  const std::size_t nobs = ov.size();
  double scale = 0.0;
  for (const cplx &v : ov) scale += std::norm(v);

  // Row-major copies keep the per-entry r-length dot products contiguous.
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  CompletionResult res;
  TruncatedSvd f = truncated_svd(problem.observed, r);
  std::vector<cplx> q(nobs);
  for (int k = 1;; ++k) {
    const RowMat US = f.U * f.s.cast<cplx>().asDiagonal();
    const RowMat Vc = f.V.conjugate();
    double obj = 0.0;
    for (std::size_t e = 0; e < nobs; ++e) {
      q[e] = ov[e] - US.row(oi[e]).cwiseProduct(Vc.row(oj[e])).sum();
      obj += std::norm(q[e]);
    }
    if (!std::isfinite(obj)) throw NumericalError("rgrad: non-finite iterate");
    if (record(res, 0.5 * obj, opts.tol, scale)) {
      res.converged = true;
      break;
    }
    if (k >= opts.max_iters) break;

    // Y1 = U^H Q (r x T) and Y2 = Q V (N x r) from the sparse residual.
    const RowMat Uc = f.U.conjugate();
    const RowMat Vr = f.V;
    RowMat Y1t = RowMat::Zero(cols, r), Y2 = RowMat::Zero(rows, r);
    for (std::size_t e = 0; e < nobs; ++e) {
      Y1t.row(oj[e]) += q[e] * Uc.row(oi[e]);
      Y2.row(oi[e]) += q[e] * Vr.row(oj[e]);
    }
    const ComplexMatrix M = Y1t.transpose() * f.V;           // U^H Q V
    const ComplexMatrix Lperp = Y2 - f.U * M;               // (I - UU^H) Q V
    const ComplexMatrix Rperp = Y1t.conjugate() - f.V * M.adjoint(); // (I - VV^H) Q^H U

    // P_T(Q) = U Y1 + Lperp V^H; the two terms are orthogonal.
    const double num = Y1t.squaredNorm() + Lperp.squaredNorm();
    const RowMat Ur = f.U, Lr = Lperp;
    const RowMat Y1c = Y1t; // row j holds column j of Y1
    double den = 0.0;
    for (std::size_t e = 0; e < nobs; ++e) {
      const cplx v = Ur.row(oi[e]).cwiseProduct(Y1c.row(oj[e])).sum() + Lr.row(oi[e]).cwiseProduct(Vc.row(oj[e])).sum();
      den += std::norm(v);
    }
    const double alpha = den > 0.0 ? num / den : 1.0;

    Eigen::HouseholderQR<ComplexMatrix> qr_left(Lperp);
    Eigen::HouseholderQR<ComplexMatrix> qr_right(Rperp);
    const ComplexMatrix Q1 = qr_left.householderQ() * ComplexMatrix::Identity(rows, r);
    const ComplexMatrix Q2 = qr_right.householderQ() * ComplexMatrix::Identity(cols, r);
    const ComplexMatrix R1 = qr_left.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const ComplexMatrix R2 = qr_right.matrixQR().topRows(r).triangularView<Eigen::Upper>();

    ComplexMatrix core = ComplexMatrix::Zero(2 * r, 2 * r);
    core.topLeftCorner(r, r) = f.s.cast<cplx>().asDiagonal();
    core.topLeftCorner(r, r) += alpha * M;
    core.topRightCorner(r, r) = alpha * R2.adjoint();
    core.bottomLeftCorner(r, r) = alpha * R1;
    Eigen::JacobiSVD<ComplexMatrix> small(core, Eigen::ComputeFullU | Eigen::ComputeFullV);

    ComplexMatrix left(rows, 2 * r), right(cols, 2 * r);
    left << f.U, Q1;
    right << f.V, Q2;
    f.U = left * small.matrixU().leftCols(r);
    f.V = right * small.matrixV().leftCols(r);
    f.s = small.singularValues().head(r);
  }
  res.A = f.U * f.s.cast<cplx>().asDiagonal() * f.V.adjoint();
  if (!all_finite(res.A)) throw NumericalError("rgrad: non-finite iterate");
  return res;
}

} // namespace

CompletionResult run_rgrad(const CompletionProblem &problem, const Options &opts) {
  problem.validate();
  if (opts.max_iters < 1) throw ConfigError("rgrad: max_iters must be positive");
  const int r = problem.rank;
  const auto min_dim = std::min(problem.observed.rows(), problem.observed.cols());
  if (problem.observed.norm() == 0.0) {
    CompletionResult res;
    res.A = ComplexMatrix::Zero(problem.observed.rows(), problem.observed.cols());
    res.objective_history.push_back(0.0);
    res.iterations_used = 1;
    res.converged = true;
    return res;
  }
  if (opts.projection == Projection::Tangent && 2 * r <= min_dim) return run_rgrad_factored(problem, opts);

  const double scale = masked_sq_norm(problem.observed, problem.mask);
  CompletionResult res;
  ComplexMatrix A = ComplexMatrix::Zero(problem.observed.rows(), problem.observed.cols());
  for (int k = 0; k < opts.max_iters; ++k) {
    A = rgrad_step(A, problem, opts.projection);
    if (!all_finite(A)) throw NumericalError("rgrad: non-finite iterate");
    if (record(res, objective(A, problem), opts.tol, scale)) {
      res.converged = true;
      break;
    }
  }
  res.A = std::move(A);
  return res;
}

namespace {

template <typename Shrink>
CompletionResult run_thresholded(const CompletionProblem &problem, const Options &opts, Shrink &&shrink) {
  problem.validate();
  if (opts.max_iters < 1) throw ConfigError("completion: max_iters must be positive");
  const double scale = masked_sq_norm(problem.observed, problem.mask);
  CompletionResult res;
  ComplexMatrix A = ComplexMatrix::Zero(problem.observed.rows(), problem.observed.cols());
  if (scale == 0.0) {
    res.A = A;
    res.objective_history.push_back(0.0);
    res.iterations_used = 1;
    res.converged = true;
    return res;
  }
  for (int k = 0; k < opts.max_iters; ++k) {
    const ComplexMatrix W = A + opts.step * masked(problem.observed - A, problem.mask);
    A = shrink(W, k);
    if (!all_finite(A)) throw NumericalError("completion: non-finite iterate");
    if (record(res, objective(A, problem), opts.tol, scale)) {
      res.converged = true;
      break;
    }
  }
  res.A = std::move(A);
  return res;
}

} // namespace

CompletionResult run_iht(const CompletionProblem &problem, const Options &opts) {
  return run_thresholded(problem, opts, [&](const ComplexMatrix &W, int) { return hard_threshold(W, problem.rank); });
}

CompletionResult run_ist(const CompletionProblem &problem, const Options &opts) {
  double tau = opts.threshold.value_or(-1.0);
  const int r = problem.rank;
  return run_thresholded(problem, opts, [&](const ComplexMatrix &W, int k) {
    Eigen::BDCSVD<ComplexMatrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("ist: SVD did not converge");
    const RealVector &sv = svd.singularValues();
    if (k == 0 && tau < 0.0) tau = r < sv.size() ? sv(r) : 0.0;
    RealVector s = (sv.array() - tau).cwiseMax(0.0).matrix();
    s.tail(s.size() - r).setZero();
    return ComplexMatrix(svd.matrixU() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint());
  });
}

ComplexMatrix recover_H(const ComplexMatrix &A, const ComplexMatrix &X) {
  if (A.cols() != X.cols()) throw ConfigError("recover_H: A and X must share the pilot length");
  if (X.rows() > X.cols()) throw NumericalError("recover_H: pilot length shorter than transmit antennas");
  // H^H solves the least-squares system X^H H^H = A^H.
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(X.adjoint());
  qr.setThreshold(1e-10);
  if (qr.rank() < X.rows()) throw NumericalError("recover_H: pilot matrix is rank deficient");
  return qr.solve(A.adjoint()).adjoint();
}

} // namespace jbfmc::completion
