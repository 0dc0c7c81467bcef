// SPDX-License-Identifier: Apache-2.0
#include "jbfmc/bigamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jbfmc::bigamp {

namespace {

template <typename M> auto cspan(const M &m) {
  return std::span<const typename M::Scalar>(m.data(), static_cast<std::size_t>(m.size()));
}

template <typename M> auto mspan(M &m) {
  return std::span<typename M::Scalar>(m.data(), static_cast<std::size_t>(m.size()));
}

double floored(double v) { return v > kVarianceFloor ? v : kVarianceFloor; }

template <typename M> void damp(M &current, const M &previous, double damping) {
  if (damping < 1.0) current = damping * current + (1.0 - damping) * previous;
}

template <typename M> bool finite(const M &m) {
  if constexpr (std::is_same_v<typename M::Scalar, cplx>)
    return m.real().allFinite() && m.imag().allFinite();
  else
    return m.allFinite();
}

} // namespace

void Priors::validate() const {
  if (!(nu_g > 0.0) || !(nu_z > 0.0)) throw ConfigError("priors: nu_g and nu_z must be positive");
  if (!(noise_var >= 0.0)) throw ConfigError("priors: noise variance must be >= 0");
  if (support.size() == 0) throw ConfigError("priors: empty support mask");
}

BigAmpState init_state(const Priors &priors, Eigen::Index num_rx, model::Rng &rng, bool jitter) {
  priors.validate();
  const Eigen::Index L = num_rx, N = priors.support.rows(), T = priors.support.cols();
  BigAmpState s;
  s.g = model::complex_gaussian(rng, L, N, priors.nu_g);
  s.vg = RealMatrix::Constant(L, N, priors.nu_g);
  s.q_hat = ComplexMatrix::Zero(L, N);
  s.vq = RealMatrix::Constant(L, N, priors.nu_g);

  s.z = ComplexMatrix::Zero(N, T);
  s.vz = RealMatrix::Zero(N, T);
  const double vz0 = floored(priors.sparsity_level * priors.nu_z);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index n = 0; n < N; ++n)
      if (priors.support(n, t)) {
        s.vz(n, t) = vz0;
        if (jitter) s.z(n, t) = model::complex_gaussian(rng, 0.01 * priors.nu_z);
      }
  s.r_hat = ComplexMatrix::Zero(N, T);
  s.vr = RealMatrix::Constant(N, T, priors.nu_z);

  s.p_bar = ComplexMatrix::Zero(L, T);
  s.vp_bar = RealMatrix::Constant(L, T, kVarianceFloor);
  s.p_hat = ComplexMatrix::Zero(L, T);
  s.vp = RealMatrix::Constant(L, T, kVarianceFloor);
  s.b_hat = ComplexMatrix::Zero(L, T);
  s.vb = RealMatrix::Constant(L, T, kVarianceFloor);
  s.u = ComplexMatrix::Zero(L, T);
  s.vu = RealMatrix::Zero(L, T);
  return s;
}

Moments denoise_g(cplx q_hat, double vq, double nu_g) {
  if (std::isnan(vq) || std::isnan(q_hat.real()) || std::isnan(q_hat.imag()))
    throw NumericalError("denoise: NaN pseudo-observation");
  vq = floored(vq);
  if (std::isinf(vq)) return {cplx(0.0, 0.0), nu_g};
  const double denom = nu_g + vq;
  return {q_hat * (nu_g / denom), nu_g * vq / denom};
}

Moments denoise_z(cplx r_hat, double vr, bool on, double nu_z) {
  if (!on) return {cplx(0.0, 0.0), 0.0};
  return denoise_g(r_hat, vr, nu_z);
}

void iterate_inplace(BigAmpState &s, const ComplexMatrix &Y, const Priors &priors, double damping,
                     const simd::KernelTable &kernels) {
  const Eigen::Index L = s.rows(), N = s.inner(), T = s.cols();
  if (Y.rows() != L || Y.cols() != T || priors.support.rows() != N || priors.support.cols() != T)
    throw ConfigError("bigamp: state, observation and support dimensions disagree");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("bigamp: damping must lie in (0, 1]");
  const simd::SweepDims dims{static_cast<int>(L), static_cast<int>(N), static_cast<int>(T)};
  const double sigma2 = priors.noise_var;
  const bool damp_outputs = s.has_output_history;

  const RealMatrix g2 = s.g.cwiseAbs2();
  const RealMatrix z2 = s.z.cwiseAbs2();

  // Plug-in output moments and their uncertainty.
  const RealMatrix vp_bar_prev = s.vp_bar;
  const RealMatrix vp_prev = s.vp;
  RealMatrix vp_gz(L, T);
  kernels.output_sums({dims, cspan(s.g), cspan(g2), cspan(s.vg), cspan(s.z), cspan(z2), cspan(s.vz), mspan(s.p_bar),
                       mspan(s.vp_bar), mspan(vp_gz)});
  s.vp = (s.vp_bar + vp_gz).unaryExpr(&floored);
  s.vp_bar = s.vp_bar.unaryExpr(&floored);
  if (damp_outputs) {
    damp(s.vp_bar, vp_bar_prev, damping);
    damp(s.vp, vp_prev, damping);
  }

  // Onsager-corrected prediction uses the previous scaled residual.
  s.p_hat = s.p_bar - (s.u.array() * s.vp_bar.array().cast<cplx>()).matrix();

  // Posterior of the noiseless output under the Gaussian likelihood.
  const auto vp = s.vp.array();
  s.vb = (sigma2 * vp / (vp + sigma2)).unaryExpr(&floored);
  s.b_hat = ((vp / (vp + sigma2)).cast<cplx>() * (Y - s.p_hat).array() + s.p_hat.array()).matrix();

  const ComplexMatrix u_prev = s.u;
  const RealMatrix vu_prev = s.vu;
  s.vu = ((1.0 - s.vb.array() / vp) / vp).matrix().unaryExpr(&floored);
  s.u = ((s.b_hat - s.p_hat).array() / vp.cast<cplx>()).matrix();
  if (damp_outputs) {
    damp(s.u, u_prev, damping);
    damp(s.vu, vu_prev, damping);
  }

  // Pseudo-observations of G.
  RealMatrix a(L, N), b(L, N);
  ComplexMatrix c(L, N);
  kernels.g_side_sums({dims, cspan(s.z), cspan(z2), cspan(s.vz), cspan(s.vu), cspan(s.u), mspan(a), mspan(b), mspan(c)});
  s.vq = a.unaryExpr([](double x) { return 1.0 / floored(x); });
  s.q_hat = (s.g.array() * (1.0 - s.vq.array() * b.array()).cast<cplx>() + s.vq.array().cast<cplx>() * c.array())
                .matrix();

  // Pseudo-observations of Z.
  RealMatrix d(N, T), e(N, T);
  ComplexMatrix f(N, T);
  kernels.z_side_sums({dims, cspan(s.g), cspan(g2), cspan(s.vg), cspan(s.vu), cspan(s.u), mspan(d), mspan(e), mspan(f)});
  s.vr = d.unaryExpr([](double x) { return 1.0 / floored(x); });
  s.r_hat = (s.z.array() * (1.0 - s.vr.array() * e.array()).cast<cplx>() + s.vr.array().cast<cplx>() * f.array())
                .matrix();

  if (!finite(s.q_hat) || !finite(s.r_hat) || !finite(s.p_hat))
    throw DivergenceError(s.sweep, "bigamp: non-finite messages");

  // Input denoising.
  ComplexMatrix g_new(L, N);
  RealMatrix vg_new(L, N);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index l = 0; l < L; ++l) {
      const Moments m = denoise_g(s.q_hat(l, n), s.vq(l, n), priors.nu_g);
      g_new(l, n) = m.mean;
      vg_new(l, n) = floored(m.var);
    }
  ComplexMatrix z_new(N, T);
  RealMatrix vz_new(N, T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index n = 0; n < N; ++n) {
      const bool on = priors.support(n, t);
      const Moments m = denoise_z(s.r_hat(n, t), s.vr(n, t), on, priors.nu_z);
      z_new(n, t) = m.mean;
      vz_new(n, t) = on ? floored(m.var) : 0.0;
    }
  damp(g_new, s.g, damping);
  damp(vg_new, s.vg, damping);
  damp(z_new, s.z, damping);
  damp(vz_new, s.vz, damping);
  s.g = std::move(g_new);
  s.vg = std::move(vg_new);
  s.z = std::move(z_new);
  s.vz = std::move(vz_new);

  if (!finite(s.g) || !finite(s.z)) throw DivergenceError(s.sweep, "bigamp: non-finite estimates");
  ++s.sweep;
  s.has_output_history = true;
}

BigAmpState iterate(BigAmpState state, const ComplexMatrix &Y, const Priors &priors, double damping) {
  iterate_inplace(state, Y, priors, damping);
  return state;
}

FactorizationResult run(const ComplexMatrix &Y, const Priors &priors, const Options &opts, model::Rng &rng) {
  priors.validate();
  if (!all_finite(Y)) throw NumericalError("bigamp: observation contains non-finite values");
  if (opts.max_restarts < 1 || opts.max_sweeps < 1) throw ConfigError("bigamp: iteration limits must be positive");
  if (Y.cols() != priors.support.cols()) throw ConfigError("bigamp: Y and support disagree on T");

  const BigAmpState initial = init_state(priors, Y.rows(), rng, opts.jitter);
  BigAmpState state = initial;

  FactorizationResult result;
  double best = std::numeric_limits<double>::infinity();
  result.G = state.g;
  result.Z = state.z;

  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    if (restart > 0) {
      // Keep G, restart Z from its initial value.
      state.z = initial.z;
      state.vz = initial.vz;
      state.u.setZero();
      state.vu.setZero();
      state.sweep = 0;
      state.has_output_history = false;
    }

    ComplexMatrix best_g = state.g, best_z = state.z;
    double restart_best = (Y - state.g * state.z).norm();
    bool converged = false;
    bool diverged = false;
    ComplexMatrix p_prev;
    for (int j = 0; j < opts.max_sweeps; ++j) {
      try {
        iterate_inplace(state, Y, priors, opts.damping);
      } catch (const DivergenceError &) {
        diverged = true;
        break;
      }
      ++result.iterations_used;
      // p_bar of this sweep is G Z before the update; evaluate the residual of the new iterate.
      const double residual = (Y - state.g * state.z).norm();
      if (residual < restart_best) {
        restart_best = residual;
        best_g = state.g;
        best_z = state.z;
      } else if (residual > opts.divergence_factor * restart_best && restart_best > 0.0) {
        break;
      }
      if (j > 0) {
        const double denom = p_prev.norm();
        const double change = denom > 0.0 ? (state.p_hat - p_prev).norm() / denom : (state.p_hat - p_prev).norm();
        if (change < opts.tol) {
          converged = true;
          break;
        }
      }
      p_prev = state.p_hat;
    }
    ++result.restarts_used;
    if (converged && !diverged) result.converged = true;

    const double previous_best = best;
    if (restart_best < best) {
      best = restart_best;
      result.G = best_g;
      result.Z = best_z;
    }
    result.residual_history.push_back(best);

    if (diverged) {
      // A blown-up G is useless as a warm start.
      BigAmpState fresh = init_state(priors, Y.rows(), rng, opts.jitter);
      state.g = fresh.g;
      state.vg = fresh.vg;
    }
    if (opts.restart_tol > 0.0 && converged && std::isfinite(previous_best) &&
        previous_best - best <= opts.restart_tol * previous_best)
      break;
  }
  return result;
}

} // namespace jbfmc::bigamp
