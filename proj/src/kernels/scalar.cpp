// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace jbfmc::simd {

namespace {

// Plain complex products; std::complex operator* adds NaN recovery calls.
inline cplx mul(cplx x, cplx y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

inline cplx conj_mul(cplx x, cplx y) {
  return {x.real() * y.real() + x.imag() * y.imag(), x.real() * y.imag() - x.imag() * y.real()};
}

void output_sums_scalar(const OutputSumsArgs &a) {
  const auto [L, N, T] = a.dims;
  const std::size_t ldl = static_cast<std::size_t>(L);
  const std::size_t ldn = static_cast<std::size_t>(N);
  for (int t = 0; t < T; ++t) {
    cplx *pb = a.p_bar.data() + t * ldl;
    double *vpb = a.vp_bar.data() + t * ldl;
    double *vgz = a.vp_gz.data() + t * ldl;
    std::fill(pb, pb + L, cplx(0.0, 0.0));
    std::fill(vpb, vpb + L, 0.0);
    std::fill(vgz, vgz + L, 0.0);
    for (int n = 0; n < N; ++n) {
      const std::size_t nt = n + t * ldn;
      const cplx zv = a.z[nt];
      const double z2v = a.z2[nt];
      const double vzv = a.vz[nt];
      if (vzv == 0.0 && z2v == 0.0) continue;
      const cplx *gc = a.g.data() + n * ldl;
      const double *g2c = a.g2.data() + n * ldl;
      const double *vgc = a.vg.data() + n * ldl;
      for (int l = 0; l < L; ++l) {
        pb[l] += mul(gc[l], zv);
        vpb[l] += g2c[l] * vzv + vgc[l] * z2v;
        vgz[l] += vgc[l] * vzv;
      }
    }
  }
}

void g_side_sums_scalar(const GSideSumsArgs &a) {
  const auto [L, N, T] = a.dims;
  const std::size_t ldl = static_cast<std::size_t>(L);
  const std::size_t ldn = static_cast<std::size_t>(N);
  for (int n = 0; n < N; ++n) {
    double *ac = a.a.data() + n * ldl;
    double *bc = a.b.data() + n * ldl;
    cplx *cc = a.c.data() + n * ldl;
    std::fill(ac, ac + L, 0.0);
    std::fill(bc, bc + L, 0.0);
    std::fill(cc, cc + L, cplx(0.0, 0.0));
    for (int t = 0; t < T; ++t) {
      const std::size_t nt = n + t * ldn;
      const double z2v = a.z2[nt];
      const double vzv = a.vz[nt];
      if (vzv == 0.0 && z2v == 0.0) continue;
      const cplx zv = a.z[nt];
      const double *vuc = a.vu.data() + t * ldl;
      const cplx *uc = a.u.data() + t * ldl;
      for (int l = 0; l < L; ++l) {
        ac[l] += z2v * vuc[l];
        bc[l] += vzv * vuc[l];
        cc[l] += conj_mul(zv, uc[l]);
      }
    }
  }
}

void z_side_sums_scalar(const ZSideSumsArgs &a) {
  const auto [L, N, T] = a.dims;
  const std::size_t ldl = static_cast<std::size_t>(L);
  const std::size_t ldn = static_cast<std::size_t>(N);
  for (int t = 0; t < T; ++t) {
    const double *vuc = a.vu.data() + t * ldl;
    const cplx *uc = a.u.data() + t * ldl;
    for (int n = 0; n < N; ++n) {
      const cplx *gc = a.g.data() + n * ldl;
      const double *g2c = a.g2.data() + n * ldl;
      const double *vgc = a.vg.data() + n * ldl;
      double d = 0.0, e = 0.0;
      cplx f(0.0, 0.0);
      for (int l = 0; l < L; ++l) {
        d += g2c[l] * vuc[l];
        e += vgc[l] * vuc[l];
        f += conj_mul(gc[l], uc[l]);
      }
      const std::size_t nt = n + t * ldn;
      a.d[nt] = d;
      a.e[nt] = e;
      a.f[nt] = f;
    }
  }
}

} // namespace

const KernelTable &scalar_kernels() {
  static const KernelTable table{"scalar", &output_sums_scalar, &g_side_sums_scalar, &z_side_sums_scalar};
  return table;
}

} // namespace jbfmc::simd
