// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "jbfmc/kernels.hpp"
#include "jbfmc/model.hpp"

using namespace jbfmc;

namespace {

template <typename M> auto sp(M &m) { return std::span(m.data(), static_cast<std::size_t>(m.size())); }

struct Inputs {
  int L, N, T;
  ComplexMatrix g, z, u;
  RealMatrix vg, vz, vu, g2, z2;
};

Inputs random_inputs(std::uint64_t seed, int L, int N, int T, double zero_fraction) {
  model::Rng rng(seed);
  Inputs in{L, N, T};
  in.g = model::complex_gaussian(rng, L, N);
  in.z = model::complex_gaussian(rng, N, T);
  in.u = model::complex_gaussian(rng, L, T);
  std::uniform_real_distribution<double> unif(0.01, 2.0);
  std::bernoulli_distribution off(zero_fraction);
  in.vg = RealMatrix::NullaryExpr(L, N, [&] { return unif(rng); });
  in.vz = RealMatrix::NullaryExpr(N, T, [&] { return unif(rng); });
  in.vu = RealMatrix::NullaryExpr(L, T, [&] { return unif(rng); });
  for (Eigen::Index i = 0; i < in.z.size(); ++i)
    if (off(rng)) {
      in.z(i) = 0.0;
      in.vz(i) = 0.0;
    }
  in.g2 = in.g.cwiseAbs2();
  in.z2 = in.z.cwiseAbs2();
  return in;
}

struct Outputs {
  ComplexMatrix p_bar, c, f;
  RealMatrix vp_bar, vp_gz, a, b, d, e;
};

Outputs run(const simd::KernelTable &k, Inputs &in) {
  Outputs o;
  o.p_bar.resize(in.L, in.T);
  o.vp_bar.resize(in.L, in.T);
  o.vp_gz.resize(in.L, in.T);
  o.a.resize(in.L, in.N);
  o.b.resize(in.L, in.N);
  o.c.resize(in.L, in.N);
  o.d.resize(in.N, in.T);
  o.e.resize(in.N, in.T);
  o.f.resize(in.N, in.T);
  const simd::SweepDims dims{in.L, in.N, in.T};
  k.output_sums({dims, sp(in.g), sp(in.g2), sp(in.vg), sp(in.z), sp(in.z2), sp(in.vz), sp(o.p_bar), sp(o.vp_bar),
                 sp(o.vp_gz)});
  k.g_side_sums({dims, sp(in.z), sp(in.z2), sp(in.vz), sp(in.vu), sp(in.u), sp(o.a), sp(o.b), sp(o.c)});
  k.z_side_sums({dims, sp(in.g), sp(in.g2), sp(in.vg), sp(in.vu), sp(in.u), sp(o.d), sp(o.e), sp(o.f)});
  return o;
}

template <typename A, typename B> double rel(const A &x, const B &y) {
  const double scale = y.norm();
  return scale > 0.0 ? (x - y).norm() / scale : (x - y).norm();
}

} // namespace

// Matrix-product form of every sum, computed without the kernels.
TEST(ScalarKernels, MatchMatrixProducts) {
  for (auto [L, N, T] : {std::tuple{3, 2, 4}, std::tuple{9, 13, 17}, std::tuple{1, 1, 1}}) {
    Inputs in = random_inputs(100 + L, L, N, T, 0.4);
    const Outputs o = run(simd::scalar_kernels(), in);
    EXPECT_LT(rel(o.p_bar, in.g * in.z), 1e-13);
    EXPECT_LT(rel(o.vp_bar, in.g2 * in.vz + in.vg * in.z2), 1e-13);
    EXPECT_LT(rel(o.vp_gz, in.vg * in.vz), 1e-13);
    EXPECT_LT(rel(o.a, in.vu * in.z2.transpose()), 1e-13);
    EXPECT_LT(rel(o.b, in.vu * in.vz.transpose()), 1e-13);
    EXPECT_LT(rel(o.c, in.u * in.z.adjoint()), 1e-13);
    EXPECT_LT(rel(o.d, in.g2.transpose() * in.vu), 1e-13);
    EXPECT_LT(rel(o.e, in.vg.transpose() * in.vu), 1e-13);
    EXPECT_LT(rel(o.f, in.g.adjoint() * in.u), 1e-13);
  }
}

TEST(Avx2Kernels, EquivalentToScalar) {
  const simd::KernelTable *fast = simd::avx2_kernels();
  if (fast == nullptr) GTEST_SKIP() << "AVX2 not available on this machine";
  // Odd sizes exercise the vector tails; the zero fraction exercises the skip path.
  for (auto [L, N, T] : {std::tuple{1, 1, 1}, std::tuple{2, 3, 5}, std::tuple{16, 32, 128}, std::tuple{7, 70, 33}}) {
    for (double zeros : {0.0, 0.8, 1.0}) {
      Inputs in = random_inputs(7 * L + N, L, N, T, zeros);
      const Outputs s = run(simd::scalar_kernels(), in);
      const Outputs v = run(*fast, in);
      EXPECT_LT(rel(v.p_bar, s.p_bar), 1e-13);
      EXPECT_LT(rel(v.vp_bar, s.vp_bar), 1e-13);
      EXPECT_LT(rel(v.vp_gz, s.vp_gz), 1e-13);
      EXPECT_LT(rel(v.a, s.a), 1e-13);
      EXPECT_LT(rel(v.b, s.b), 1e-13);
      EXPECT_LT(rel(v.c, s.c), 1e-13);
      EXPECT_LT(rel(v.d, s.d), 1e-13);
      EXPECT_LT(rel(v.e, s.e), 1e-13);
      EXPECT_LT(rel(v.f, s.f), 1e-13);
    }
  }
}

TEST(KernelDispatch, ActiveTableIsOneOfTheVariants) {
  const auto &k = simd::active_kernels();
  EXPECT_TRUE(k.name == "scalar" || k.name == "avx2");
  EXPECT_NE(k.output_sums, nullptr);
}
