// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel sums of the message-passing sweep. Every array is
// column-major with leading dimension equal to its row count:
//   L x N : g, g2 (|g|^2), vg and the g-side outputs a, b, c
//   N x T : z, z2 (|z|^2), vz and the z-side outputs d, e, f
//   L x T : vu, u and the output-side results
// Each kernel exists as a scalar reference and, on x86-64, an AVX2+FMA
// variant; the active table is picked once at startup.
#pragma once

#include <complex>
#include <span>
#include <string_view>

namespace jbfmc::simd {

using cplx = std::complex<double>;

struct SweepDims {
  int L;
  int N;
  int T;
};

struct OutputSumsArgs {
  SweepDims dims;
  std::span<const cplx> g;
  std::span<const double> g2;
  std::span<const double> vg;
  std::span<const cplx> z;
  std::span<const double> z2;
  std::span<const double> vz;
  std::span<cplx> p_bar;    // sum_n g z
  std::span<double> vp_bar; // sum_n |g|^2 vz + vg |z|^2
  std::span<double> vp_gz;  // sum_n vg vz
};

struct GSideSumsArgs {
  SweepDims dims;
  std::span<const cplx> z;
  std::span<const double> z2;
  std::span<const double> vz;
  std::span<const double> vu;
  std::span<const cplx> u;
  std::span<double> a; // sum_t |z|^2 vu
  std::span<double> b; // sum_t vz vu
  std::span<cplx> c;   // sum_t conj(z) u
};

struct ZSideSumsArgs {
  SweepDims dims;
  std::span<const cplx> g;
  std::span<const double> g2;
  std::span<const double> vg;
  std::span<const double> vu;
  std::span<const cplx> u;
  std::span<double> d; // sum_l |g|^2 vu
  std::span<double> e; // sum_l vg vu
  std::span<cplx> f;   // sum_l conj(g) u
};

struct KernelTable {
  std::string_view name;
  void (*output_sums)(const OutputSumsArgs &);
  void (*g_side_sums)(const GSideSumsArgs &);
  void (*z_side_sums)(const ZSideSumsArgs &);
};

const KernelTable &scalar_kernels();

/// nullptr when the binary or the CPU lacks AVX2+FMA.
const KernelTable *avx2_kernels();

/// Best table for this machine. JBFMC_SIMD=scalar|avx2 in the environment
/// overrides the choice (an unavailable request falls back to scalar).
const KernelTable &active_kernels();

} // namespace jbfmc::simd
