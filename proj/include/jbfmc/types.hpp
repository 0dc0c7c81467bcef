// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jbfmc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or mismatched dimensions.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A numerical routine failed (singular system, SVD failure, non-finite data).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Message passing produced NaN/Inf; carries the sweep index where it happened.
class DivergenceError : public NumericalError {
public:
  DivergenceError(int iteration, const std::string &what)
      : NumericalError(what + " (sweep " + std::to_string(iteration) + ")"), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

private:
  int iteration_;
};

/// Metric requested on an input for which it is undefined (e.g. zero-norm truth).
class UndefinedMetricError : public Error {
public:
  using Error::Error;
};

void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *what);

bool all_finite(const ComplexMatrix &m);

/// Nonzero pattern of a (pilot) matrix.
Mask support_of(const ComplexMatrix &S);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const ComplexMatrix &m, double rel_tol = 1e-12);

} // namespace jbfmc
