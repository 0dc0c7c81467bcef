// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "jbfmc/bigamp.hpp"
#include "jbfmc/completion.hpp"
#include "jbfmc/eval.hpp"
#include "jbfmc/kernels.hpp"
#include "jbfmc/oracles.hpp"

namespace jbfmc::oracles {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

CheckResult denoiser_check() {
  double worst = 0.0;
  for (double re : {0.1, 2.5, 5.0})
    for (double vq : {0.01, 0.5, 10.0}) {
      const cplx q(re, 5.1 - re);
      const ScalarMoments ref = posterior_by_quadrature(q, vq, 1.5);
      const bigamp::Moments got = bigamp::denoise_g(q, vq, 1.5);
      worst = std::max({worst, std::abs(ref.mean - got.mean), std::abs(ref.var - got.var)});
    }
  return {"denoiser vs quadrature", worst <= 1e-6, "max abs error " + fmt(worst)};
}

CheckResult kernel_check() {
  const simd::KernelTable *fast = simd::avx2_kernels();
  if (fast == nullptr) return {"simd kernels vs scalar", true, "avx2 unavailable, scalar only"};
  model::Rng rng(7);
  const int L = 11, N = 7, T = 13;
  const ComplexMatrix g = model::complex_gaussian(rng, L, N), z = model::complex_gaussian(rng, N, T);
  const ComplexMatrix u = model::complex_gaussian(rng, L, T);
  const RealMatrix vg = RealMatrix::Random(L, N).cwiseAbs(), vz = RealMatrix::Random(N, T).cwiseAbs();
  const RealMatrix vu = RealMatrix::Random(L, T).cwiseAbs();
  const RealMatrix g2 = g.cwiseAbs2(), z2 = z.cwiseAbs2();
  const simd::SweepDims dims{L, N, T};
  auto cs = [](auto &m) { return std::span(m.data(), static_cast<std::size_t>(m.size())); };

  double worst = 0.0;
  {
    ComplexMatrix p1(L, T), p2(L, T);
    RealMatrix a1(L, T), a2(L, T), b1(L, T), b2(L, T);
    simd::scalar_kernels().output_sums({dims, cs(g), cs(g2), cs(vg), cs(z), cs(z2), cs(vz), cs(p1), cs(a1), cs(b1)});
    fast->output_sums({dims, cs(g), cs(g2), cs(vg), cs(z), cs(z2), cs(vz), cs(p2), cs(a2), cs(b2)});
    worst = std::max({worst, (p1 - p2).norm() / p1.norm(), (a1 - a2).norm() / a1.norm(), (b1 - b2).norm() / b1.norm()});
  }
  {
    RealMatrix a1(L, N), a2(L, N), b1(L, N), b2(L, N);
    ComplexMatrix c1(L, N), c2(L, N);
    simd::scalar_kernels().g_side_sums({dims, cs(z), cs(z2), cs(vz), cs(vu), cs(u), cs(a1), cs(b1), cs(c1)});
    fast->g_side_sums({dims, cs(z), cs(z2), cs(vz), cs(vu), cs(u), cs(a2), cs(b2), cs(c2)});
    worst = std::max({worst, (a1 - a2).norm() / a1.norm(), (b1 - b2).norm() / b1.norm(), (c1 - c2).norm() / c1.norm()});
  }
  {
    RealMatrix d1(N, T), d2(N, T), e1(N, T), e2(N, T);
    ComplexMatrix f1(N, T), f2(N, T);
    simd::scalar_kernels().z_side_sums({dims, cs(g), cs(g2), cs(vg), cs(vu), cs(u), cs(d1), cs(e1), cs(f1)});
    fast->z_side_sums({dims, cs(g), cs(g2), cs(vg), cs(vu), cs(u), cs(d2), cs(e2), cs(f2)});
    worst = std::max({worst, (d1 - d2).norm() / d1.norm(), (e1 - e2).norm() / e1.norm(), (f1 - f2).norm() / f1.norm()});
  }
  return {"simd kernels vs scalar", worst <= 1e-12, "max relative difference " + fmt(worst)};
}

CheckResult eckart_young_check() {
  model::Rng rng(11);
  const ComplexMatrix W = model::complex_gaussian(rng, 9, 7);
  const int r = 2;
  const double best = (W - completion::hard_threshold(W, r)).norm();
  int beaten = 0;
  for (int i = 0; i < 100; ++i)
    if ((W - random_low_rank(rng, 9, 7, r)).norm() > best) ++beaten;
  return {"hard threshold vs random rank-r competitors", beaten == 100, std::to_string(beaten) + "/100 beaten"};
}

CheckResult ambiguity_check() {
  model::Rng rng(13);
  model::SystemConfig cfg;
  const model::ChannelRealization ch = model::draw_channels(cfg, rng);
  ComplexVector phi(cfg.num_surface_elements);
  for (Eigen::Index n = 0; n < phi.size(); ++n)
    phi(n) = std::polar(std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng)),
                        std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
  const ComplexMatrix G_hat = ch.G * phi.asDiagonal();
  const ComplexMatrix H_hat = phi.cwiseInverse().asDiagonal() * ch.H;
  const eval::AlignedEstimates a = eval::align(G_hat, H_hat, ch);
  const double worst = std::max(eval::nmse(a.G_aligned, ch.G), eval::nmse(a.H_aligned, ch.H));
  return {"ambiguity invariance", worst < 1e-20, "max nmse " + fmt(worst)};
}

CheckResult pseudo_inverse_check() {
  model::Rng rng(17);
  const ComplexMatrix H = model::complex_gaussian(rng, 6, 4), X = model::complex_gaussian(rng, 4, 10);
  const double err = (completion::recover_H(H * X, X) - H).norm() / H.norm();
  return {"pseudo-inverse recovery", err < 1e-12, "relative error " + fmt(err)};
}

} // namespace

std::vector<CheckResult> run_selftest() {
  return {denoiser_check(), kernel_check(), eckart_young_check(), ambiguity_check(), pseudo_inverse_check()};
}

} // namespace jbfmc::oracles
