// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace jbfmc::model {

void SystemConfig::validate() const {
  auto fail = [](const std::string &msg) { throw ConfigError("invalid SystemConfig: " + msg); };
  const int M = num_bs_antennas, N = num_surface_elements, L = num_rx_antennas, T = pilot_length;
  if (M < 1 || N < 1 || L < 1 || T < 1) fail("dimensions must be positive");
  if (num_paths_h < 1 || num_paths_g < 1 || completion_rank < 1) fail("path counts and rank must be positive");
  if (T < M) fail("pilot_length must be >= num_bs_antennas");
  if (num_paths_h >= std::min(N, M)) fail("num_paths_h must be < min(N, M)");
  if (num_paths_g >= std::min(L, N)) fail("num_paths_g must be < min(L, N)");
  if (completion_rank > std::min(N, T)) fail("completion_rank must be <= min(N, T)");
  // lambda = 0 is representable (the trial is then reported as failed).
  if (!(sparsity_level >= 0.0 && sparsity_level <= 1.0)) fail("sparsity_level must lie in [0, 1]");
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) fail("noise_power must be finite and >= 0");
}

double snr_db_to_noise_power(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double noise_power_to_snr_db(double noise_power) { return -10.0 * std::log10(noise_power); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

RngStreams::RngStreams(std::uint64_t seed)
    : channel(derive_seed(seed, 1)), pilot(derive_seed(seed, 2)), noise(derive_seed(seed, 3)),
      algorithm(derive_seed(seed, 4)) {}

cplx complex_gaussian(Rng &rng, double variance) {
  std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
  const double re = dist(rng);
  const double im = dist(rng);
  return {re, im};
}

ComplexMatrix complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance) {
  ComplexMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_gaussian(rng, variance);
  return out;
}

ComplexVector steering_vector(int num_antennas, double omega) {
  ComplexVector a(num_antennas);
  for (int m = 0; m < num_antennas; ++m) a(m) = std::polar(1.0, -std::numbers::pi * m * omega);
  return a;
}

namespace {

// Uniform on (0, 1].
double unit_interval(Rng &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return 1.0 - u(rng);
}

} // namespace

ChannelRealization draw_channels(const SystemConfig &config, Rng &rng) {
  const int M = config.num_bs_antennas, N = config.num_surface_elements, L = config.num_rx_antennas;
  ChannelRealization ch{ComplexMatrix::Zero(N, M), ComplexMatrix::Zero(L, N)};
  for (int k = 0; k < config.num_paths_h; ++k) {
    const double surface_angle = unit_interval(rng);
    const double bs_angle = unit_interval(rng);
    const cplx gain = complex_gaussian(rng);
    ch.H += gain * steering_vector(N, surface_angle) * steering_vector(M, bs_angle).adjoint();
  }
  for (int k = 0; k < config.num_paths_g; ++k) {
    const double rx_angle = unit_interval(rng);
    const double surface_angle = unit_interval(rng);
    const cplx gain = complex_gaussian(rng);
    ch.G += gain * steering_vector(L, rx_angle) * steering_vector(N, surface_angle).adjoint();
  }
  return ch;
}

PilotSet draw_pilots(const SystemConfig &config, Rng &rng) {
  const int M = config.num_bs_antennas, N = config.num_surface_elements, T = config.pilot_length;
  PilotSet p;
  p.S.resize(N, T);
  std::bernoulli_distribution on(config.sparsity_level);
  for (int t = 0; t < T; ++t)
    for (int n = 0; n < N; ++n) p.S(n, t) = on(rng) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  do {
    p.X = complex_gaussian(rng, M, T);
  } while (numerical_rank(p.X, 1e-10) < M);
  return p;
}

Observation synthesize(const ChannelRealization &channels, const PilotSet &pilots, double noise_power, Rng &rng) {
  const auto &H = channels.H;
  const auto &G = channels.G;
  const auto &S = pilots.S;
  const auto &X = pilots.X;
  if (H.cols() != X.rows() || S.rows() != H.rows() || S.cols() != X.cols() || G.cols() != H.rows())
    throw ConfigError("synthesize: incompatible dimensions (H " + std::to_string(H.rows()) + "x" +
                      std::to_string(H.cols()) + ", X " + std::to_string(X.rows()) + "x" +
                      std::to_string(X.cols()) + ", S " + std::to_string(S.rows()) + "x" +
                      std::to_string(S.cols()) + ", G " + std::to_string(G.rows()) + "x" +
                      std::to_string(G.cols()) + ")");
  if (!(noise_power >= 0.0)) throw ConfigError("synthesize: noise_power must be >= 0");

  const ComplexMatrix HX = H * X;
  Observation obs;
  obs.Z.resize(S.rows(), S.cols());
  for (Eigen::Index t = 0; t < S.cols(); ++t)
    for (Eigen::Index n = 0; n < S.rows(); ++n)
      obs.Z(n, t) = S(n, t) == cplx(0.0, 0.0) ? cplx(0.0, 0.0) : S(n, t) * HX(n, t);
  obs.Y = G * obs.Z;
  if (noise_power > 0.0) obs.Y += complex_gaussian(rng, obs.Y.rows(), obs.Y.cols(), noise_power);
  return obs;
}

} // namespace jbfmc::model
