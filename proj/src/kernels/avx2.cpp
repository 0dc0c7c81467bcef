// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA variants of the sweep sums. Compiled with -mavx2 -mfma; only
// reached after a runtime CPU check. Complex data stays interleaved
// (re, im), two complex values per 256-bit register.
#include "jbfmc/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

namespace jbfmc::simd {

namespace {

// x * (br + j bi) for two interleaved complex values in x.
inline __m256d cmul_broadcast(__m256d x, __m256d br, __m256d bi) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(x, br, _mm256_mul_pd(swapped, bi));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void output_sums_avx2(const OutputSumsArgs &a) {
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
    double *pbd = reinterpret_cast<double *>(pb);
    for (int n = 0; n < N; ++n) {
      const std::size_t nt = n + t * ldn;
      const cplx zv = a.z[nt];
      const double z2v = a.z2[nt];
      const double vzv = a.vz[nt];
      if (vzv == 0.0 && z2v == 0.0) continue;
      const double *gd = reinterpret_cast<const double *>(a.g.data() + n * ldl);
      const double *g2c = a.g2.data() + n * ldl;
      const double *vgc = a.vg.data() + n * ldl;

      const __m256d zr = _mm256_set1_pd(zv.real());
      const __m256d zi = _mm256_set1_pd(zv.imag());
      int l = 0;
      for (; l + 2 <= L; l += 2) {
        const __m256d gx = _mm256_loadu_pd(gd + 2 * l);
        _mm256_storeu_pd(pbd + 2 * l, _mm256_add_pd(_mm256_loadu_pd(pbd + 2 * l), cmul_broadcast(gx, zr, zi)));
      }
      for (; l < L; ++l) {
        const double gr = gd[2 * l], gi = gd[2 * l + 1];
        pbd[2 * l] += gr * zv.real() - gi * zv.imag();
        pbd[2 * l + 1] += gr * zv.imag() + gi * zv.real();
      }

      const __m256d vzb = _mm256_set1_pd(vzv);
      const __m256d z2b = _mm256_set1_pd(z2v);
      l = 0;
      for (; l + 4 <= L; l += 4) {
        const __m256d g2x = _mm256_loadu_pd(g2c + l);
        const __m256d vgx = _mm256_loadu_pd(vgc + l);
        __m256d acc = _mm256_loadu_pd(vpb + l);
        acc = _mm256_add_pd(acc, _mm256_fmadd_pd(g2x, vzb, _mm256_mul_pd(vgx, z2b)));
        _mm256_storeu_pd(vpb + l, acc);
        _mm256_storeu_pd(vgz + l, _mm256_fmadd_pd(vgx, vzb, _mm256_loadu_pd(vgz + l)));
      }
      for (; l < L; ++l) {
        vpb[l] += g2c[l] * vzv + vgc[l] * z2v;
        vgz[l] += vgc[l] * vzv;
      }
    }
  }
}

void g_side_sums_avx2(const GSideSumsArgs &a) {
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
    double *ccd = reinterpret_cast<double *>(cc);
    for (int t = 0; t < T; ++t) {
      const std::size_t nt = n + t * ldn;
      const double z2v = a.z2[nt];
      const double vzv = a.vz[nt];
      if (vzv == 0.0 && z2v == 0.0) continue;
      const cplx zv = a.z[nt];
      const double *vuc = a.vu.data() + t * ldl;
      const double *ud = reinterpret_cast<const double *>(a.u.data() + t * ldl);

      const __m256d z2b = _mm256_set1_pd(z2v);
      const __m256d vzb = _mm256_set1_pd(vzv);
      int l = 0;
      for (; l + 4 <= L; l += 4) {
        const __m256d vux = _mm256_loadu_pd(vuc + l);
        _mm256_storeu_pd(ac + l, _mm256_fmadd_pd(z2b, vux, _mm256_loadu_pd(ac + l)));
        _mm256_storeu_pd(bc + l, _mm256_fmadd_pd(vzb, vux, _mm256_loadu_pd(bc + l)));
      }
      for (; l < L; ++l) {
        ac[l] += z2v * vuc[l];
        bc[l] += vzv * vuc[l];
      }

      // u * conj(z)
      const __m256d zr = _mm256_set1_pd(zv.real());
      const __m256d zi = _mm256_set1_pd(-zv.imag());
      l = 0;
      for (; l + 2 <= L; l += 2) {
        const __m256d ux = _mm256_loadu_pd(ud + 2 * l);
        _mm256_storeu_pd(ccd + 2 * l, _mm256_add_pd(_mm256_loadu_pd(ccd + 2 * l), cmul_broadcast(ux, zr, zi)));
      }
      for (; l < L; ++l) {
        const double ur = ud[2 * l], ui = ud[2 * l + 1];
        ccd[2 * l] += zv.real() * ur + zv.imag() * ui;
        ccd[2 * l + 1] += zv.real() * ui - zv.imag() * ur;
      }
    }
  }
}

void z_side_sums_avx2(const ZSideSumsArgs &a) {
  const auto [L, N, T] = a.dims;
  const std::size_t ldl = static_cast<std::size_t>(L);
  const std::size_t ldn = static_cast<std::size_t>(N);
  const __m256d alternate = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  for (int t = 0; t < T; ++t) {
    const double *vuc = a.vu.data() + t * ldl;
    const double *ud = reinterpret_cast<const double *>(a.u.data() + t * ldl);
    for (int n = 0; n < N; ++n) {
      const double *gd = reinterpret_cast<const double *>(a.g.data() + n * ldl);
      const double *g2c = a.g2.data() + n * ldl;
      const double *vgc = a.vg.data() + n * ldl;

      __m256d dacc = _mm256_setzero_pd();
      __m256d eacc = _mm256_setzero_pd();
      int l = 0;
      for (; l + 4 <= L; l += 4) {
        const __m256d vux = _mm256_loadu_pd(vuc + l);
        dacc = _mm256_fmadd_pd(_mm256_loadu_pd(g2c + l), vux, dacc);
        eacc = _mm256_fmadd_pd(_mm256_loadu_pd(vgc + l), vux, eacc);
      }
      double d = hsum(dacc), e = hsum(eacc);
      for (; l < L; ++l) {
        d += g2c[l] * vuc[l];
        e += vgc[l] * vuc[l];
      }

      // conj(g) u: real part = sum(g .* u), imag part = sum(g .* swap(u)) with alternating sign.
      __m256d re_acc = _mm256_setzero_pd();
      __m256d im_acc = _mm256_setzero_pd();
      l = 0;
      for (; l + 2 <= L; l += 2) {
        const __m256d gx = _mm256_loadu_pd(gd + 2 * l);
        const __m256d ux = _mm256_loadu_pd(ud + 2 * l);
        re_acc = _mm256_fmadd_pd(gx, ux, re_acc);
        im_acc = _mm256_fmadd_pd(gx, _mm256_permute_pd(ux, 0b0101), im_acc);
      }
      double fr = hsum(re_acc);
      double fi = hsum(_mm256_mul_pd(im_acc, alternate));
      for (; l < L; ++l) {
        const double gr = gd[2 * l], gi = gd[2 * l + 1];
        const double ur = ud[2 * l], ui = ud[2 * l + 1];
        fr += gr * ur + gi * ui;
        fi += gr * ui - gi * ur;
      }

      const std::size_t nt = n + t * ldn;
      a.d[nt] = d;
      a.e[nt] = e;
      a.f[nt] = cplx(fr, fi);
    }
  }
}

} // namespace

const KernelTable &avx2_kernel_table() {
  static const KernelTable table{"avx2", &output_sums_avx2, &g_side_sums_avx2, &z_side_sums_avx2};
  return table;
}

} // namespace jbfmc::simd
