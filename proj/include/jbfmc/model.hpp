// SPDX-License-Identifier: Apache-2.0
//
// Synthetic scenario generation: multipath low-rank channels for the
// transmitter->surface (H) and surface->receiver (G) links, on/off surface
// training patterns with transmit pilots, and noisy received blocks
// Y = G (S o (H X)) + W.
#pragma once

#include <cstdint>
#include <random>

#include "jbfmc/types.hpp"

namespace jbfmc::model {

using Rng = std::mt19937_64;

struct SystemConfig {
  int num_bs_antennas = 16;      // M
  int num_surface_elements = 32; // N
  int num_rx_antennas = 16;      // L
  int pilot_length = 128;        // T
  double sparsity_level = 0.2;   // lambda, probability an element is on
  double noise_power = 0.01;     // sigma^2
  int num_paths_h = 2;           // K_h
  int num_paths_g = 8;           // K_g
  int completion_rank = 2;       // r
  std::uint64_t rng_seed = 1;

  /// Throws ConfigError when a structural invariant is violated.
  void validate() const;
};

double snr_db_to_noise_power(double snr_db);
double noise_power_to_snr_db(double noise_power);

struct ChannelRealization {
  ComplexMatrix H; // N x M
  ComplexMatrix G; // L x N
};

struct PilotSet {
  ComplexMatrix S; // N x T, entries 0 or unit modulus
  ComplexMatrix X; // M x T, full row rank
};

struct Observation {
  ComplexMatrix Y; // L x T
  ComplexMatrix Z; // N x T ground truth, kept for evaluation
};

/// Independent generator streams for one trial. Each stream is seeded from
/// (seed, stream id) so that any sub-draw can be reproduced on its own.
struct RngStreams {
  explicit RngStreams(std::uint64_t seed);
  Rng channel;
  Rng pilot;
  Rng noise;
  Rng algorithm;
};

/// Stable 64-bit mix of a seed with up to two indices (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Draw from CN(0, variance).
cplx complex_gaussian(Rng &rng, double variance = 1.0);
ComplexMatrix complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

/// Half-wavelength ULA response: element m (0-based) is exp(-j*pi*m*omega).
ComplexVector steering_vector(int num_antennas, double omega);

ChannelRealization draw_channels(const SystemConfig &config, Rng &rng);

PilotSet draw_pilots(const SystemConfig &config, Rng &rng);

/// Z = S o (H X) with exact zeros off the mask; Y = G Z + W, W ~ CN(0, noise_power).
Observation synthesize(const ChannelRealization &channels, const PilotSet &pilots, double noise_power, Rng &rng);

} // namespace jbfmc::model
