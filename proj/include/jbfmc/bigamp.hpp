// SPDX-License-Identifier: Apache-2.0
//
// Bilinear generalized approximate message passing for Y = G Z + W with an
// i.i.d. Gaussian prior on G and a Bernoulli-Gaussian prior on Z whose
// on/off pattern is the (known) surface training mask.
#pragma once

#include <vector>

#include "jbfmc/kernels.hpp"
#include "jbfmc/model.hpp"
#include "jbfmc/types.hpp"

namespace jbfmc::bigamp {

/// Floor applied to every variance that ends up in a denominator.
inline constexpr double kVarianceFloor = 1e-12;

struct Priors {
  double nu_g = 1.0;           // variance of G entries
  double nu_z = 1.0;           // variance of Z entries on the support
  double noise_var = 0.0;      // sigma^2
  double sparsity_level = 0.2; // lambda; scales the initial Z variance
  Mask support;                // N x T

  void validate() const;
};

struct BigAmpState {
  // inputs side, L x N
  ComplexMatrix g;
  RealMatrix vg;
  ComplexMatrix q_hat;
  RealMatrix vq;
  // inputs side, N x T
  ComplexMatrix z;
  RealMatrix vz;
  ComplexMatrix r_hat;
  RealMatrix vr;
  // output side, L x T
  ComplexMatrix p_bar;
  RealMatrix vp_bar;
  ComplexMatrix p_hat;
  RealMatrix vp;
  ComplexMatrix b_hat;
  RealMatrix vb;
  ComplexMatrix u;
  RealMatrix vu;

  int sweep = 0;                    // sweeps executed since the last (re)initialisation
  bool has_output_history = false;  // false until the first sweep fills vp/u

  Eigen::Index rows() const { return g.rows(); }   // L
  Eigen::Index inner() const { return g.cols(); }  // N
  Eigen::Index cols() const { return z.cols(); }   // T
};

struct Moments {
  cplx mean;
  double var;
};

/// Line-1 initialisation: g ~ CN(0, nu_g), vg = nu_g, z = 0, vz = lambda nu_z
/// on the support (0 elsewhere), u = 0. With jitter, support entries of z are
/// drawn from CN(0, 0.01 nu_z) instead of zero.
BigAmpState init_state(const Priors &priors, Eigen::Index num_rx, model::Rng &rng, bool jitter = false);

/// Posterior moments of g ~ CN(0, nu_g) given the pseudo-observation
/// q_hat = g + CN(0, vq). vq below the variance floor is clamped to it.
Moments denoise_g(cplx q_hat, double vq, double nu_g);

/// Same for z under the Bernoulli-Gaussian prior with known state: an off
/// element is a point mass at zero.
Moments denoise_z(cplx r_hat, double vr, bool on, double nu_z);

/// One full sweep, in place. damping in (0, 1]; 1 applies the raw updates.
/// Throws DivergenceError when a non-finite value appears.
void iterate_inplace(BigAmpState &state, const ComplexMatrix &Y, const Priors &priors, double damping,
                     const simd::KernelTable &kernels = simd::active_kernels());

BigAmpState iterate(BigAmpState state, const ComplexMatrix &Y, const Priors &priors, double damping);

struct Options {
  int max_restarts = 10;   // I_max
  int max_sweeps = 500;    // J_max
  double tol = 1e-6;       // relative change of p_hat
  double damping = 0.3;
  bool jitter = false;
  double divergence_factor = 5.0; // residual above factor * running minimum aborts the restart
  // Stop restarting once a converged restart improves the best residual by
  // less than this relative amount. 0 always runs max_restarts.
  double restart_tol = 0.0;
};

struct FactorizationResult {
  ComplexMatrix G;                     // L x N
  ComplexMatrix Z;                     // N x T, zero off the support
  int iterations_used = 0;             // total sweeps over all restarts
  int restarts_used = 0;
  std::vector<double> residual_history; // best ||Y - G Z||_F after each restart
  bool converged = false;
};

FactorizationResult run(const ComplexMatrix &Y, const Priors &priors, const Options &opts, model::Rng &rng);

} // namespace jbfmc::bigamp
