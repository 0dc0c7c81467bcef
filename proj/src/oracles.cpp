// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jbfmc::oracles {

ScalarMoments posterior_by_quadrature(cplx obs, double obs_var, double prior_var) {
  // The posterior mass sits between 0 and obs, spread no wider than the
  // narrower of the two factors.
  const double width = std::sqrt(std::min(obs_var, prior_var));
  const double pad = 12.0 * width;
  const double h = width / 8.0;
  const double re_lo = std::min(0.0, obs.real()) - pad, re_hi = std::max(0.0, obs.real()) + pad;
  const double im_lo = std::min(0.0, obs.imag()) - pad, im_hi = std::max(0.0, obs.imag()) + pad;
  const int nre = static_cast<int>(std::ceil((re_hi - re_lo) / h)) + 1;
  const int nim = static_cast<int>(std::ceil((im_hi - im_lo) / h)) + 1;

  auto log_density = [&](double re, double im) {
    const cplx x(re, im);
    return -std::norm(x) / prior_var - std::norm(obs - x) / obs_var;
  };
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < nre; ++i)
    for (int k = 0; k < nim; ++k) peak = std::max(peak, log_density(re_lo + i * h, im_lo + k * h));

  double w_sum = 0.0;
  cplx m_sum(0.0, 0.0);
  double sq_sum = 0.0;
  for (int i = 0; i < nre; ++i) {
    const double re = re_lo + i * h;
    for (int k = 0; k < nim; ++k) {
      const double im = im_lo + k * h;
      const double w = std::exp(log_density(re, im) - peak);
      w_sum += w;
      m_sum += w * cplx(re, im);
      sq_sum += w * (re * re + im * im);
    }
  }
  const cplx mean = m_sum / w_sum;
  return {mean, sq_sum / w_sum - std::norm(mean)};
}

double best_scalar_on_grid(const ComplexVector &col, const ComplexVector &target, cplx center, int radial,
                           int angular) {
  double best = std::numeric_limits<double>::infinity();
  const double base = std::max(std::abs(center), 1e-3);
  for (int a = 0; a < radial; ++a) {
    const double radius = base * (0.5 + a * (1.5 / std::max(1, radial - 1)));
    for (int b = 0; b < angular; ++b) {
      const double phase = std::arg(center) + 2.0 * std::numbers::pi * b / angular;
      best = std::min(best, (col * std::polar(radius, phase) - target).norm());
    }
  }
  return best;
}

ComplexMatrix random_low_rank(model::Rng &rng, Eigen::Index rows, Eigen::Index cols, int r) {
  return model::complex_gaussian(rng, rows, r) * model::complex_gaussian(rng, r, cols);
}

Mask random_mask(model::Rng &rng, Eigen::Index rows, Eigen::Index cols, double p) {
  std::bernoulli_distribution on(p);
  Mask m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = on(rng);
  return m;
}

} // namespace jbfmc::oracles
