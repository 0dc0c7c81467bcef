// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/types.hpp"

#include <Eigen/SVD>

namespace jbfmc {

void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
  }
}

bool all_finite(const ComplexMatrix &m) {
  return m.real().allFinite() && m.imag().allFinite();
}

Mask support_of(const ComplexMatrix &S) { return S.array() != cplx(0.0, 0.0); }

int numerical_rank(const ComplexMatrix &m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  const auto &s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

} // namespace jbfmc
