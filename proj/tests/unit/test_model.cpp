// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "jbfmc/model.hpp"

using namespace jbfmc;
using model::SystemConfig;

namespace {

SystemConfig small_config() {
  SystemConfig c;
  c.num_bs_antennas = 8;
  c.num_surface_elements = 16;
  c.num_rx_antennas = 8;
  c.pilot_length = 64;
  c.sparsity_level = 0.3;
  c.num_paths_h = 2;
  c.num_paths_g = 5;
  c.completion_rank = 2;
  return c;
}

} // namespace

TEST(SystemConfig, DefaultsAreValid) { EXPECT_NO_THROW(SystemConfig{}.validate()); }

TEST(SystemConfig, RejectsStructuralViolations) {
  auto expect_bad = [](auto mutate) {
    SystemConfig c = small_config();
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  expect_bad([](SystemConfig &c) { c.pilot_length = c.num_bs_antennas - 1; });
  expect_bad([](SystemConfig &c) { c.num_paths_h = 8; });
  expect_bad([](SystemConfig &c) { c.num_paths_g = 8; });
  expect_bad([](SystemConfig &c) { c.completion_rank = 17; });
  expect_bad([](SystemConfig &c) { c.sparsity_level = 1.5; });
  expect_bad([](SystemConfig &c) { c.noise_power = -1e-3; });
  expect_bad([](SystemConfig &c) { c.num_rx_antennas = 0; });
}

TEST(Snr, ConversionRoundTrips) {
  EXPECT_DOUBLE_EQ(model::snr_db_to_noise_power(10.0), 0.1);
  EXPECT_DOUBLE_EQ(model::snr_db_to_noise_power(0.0), 1.0);
  EXPECT_NEAR(model::noise_power_to_snr_db(model::snr_db_to_noise_power(17.5)), 17.5, 1e-12);
}

TEST(SteeringVector, UnitModulusWithLinearPhase) {
  const ComplexVector a = model::steering_vector(6, 0.3);
  for (int m = 0; m < 6; ++m) {
    EXPECT_NEAR(std::abs(a(m)), 1.0, 1e-15);
    EXPECT_NEAR(std::arg(a(m) * std::conj(std::polar(1.0, -M_PI * m * 0.3))), 0.0, 1e-12);
  }
}

TEST(Channels, RanksMatchPathCounts) {
  const SystemConfig c = small_config();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    model::Rng rng(seed);
    const auto ch = model::draw_channels(c, rng);
    ASSERT_EQ(ch.H.rows(), 16);
    ASSERT_EQ(ch.H.cols(), 8);
    ASSERT_EQ(ch.G.rows(), 8);
    ASSERT_EQ(ch.G.cols(), 16);
    EXPECT_EQ(numerical_rank(ch.H, 1e-10), c.num_paths_h);
    EXPECT_EQ(numerical_rank(ch.G, 1e-10), c.num_paths_g);
  }
}

TEST(Channels, EntryVarianceEqualsPathCount) {
  // Unit-modulus steering entries and CN(0,1) gains: E|h|^2 = K.
  SystemConfig c = small_config();
  double h = 0.0, g = 0.0;
  const int draws = 4000;
  model::Rng rng(3);
  for (int i = 0; i < draws; ++i) {
    const auto ch = model::draw_channels(c, rng);
    h += ch.H.squaredNorm() / static_cast<double>(ch.H.size());
    g += ch.G.squaredNorm() / static_cast<double>(ch.G.size());
  }
  EXPECT_NEAR(h / draws, c.num_paths_h, 0.1 * c.num_paths_h);
  EXPECT_NEAR(g / draws, c.num_paths_g, 0.1 * c.num_paths_g);
}

TEST(Pilots, BinaryPatternAndFullRowRank) {
  const SystemConfig c = small_config();
  model::Rng rng(9);
  const auto p = model::draw_pilots(c, rng);
  int on = 0;
  for (Eigen::Index i = 0; i < p.S.size(); ++i) {
    const cplx s = p.S(i);
    EXPECT_TRUE(s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0));
    on += s == cplx(1.0, 0.0);
  }
  EXPECT_NEAR(static_cast<double>(on) / p.S.size(), c.sparsity_level, 0.06);
  EXPECT_EQ(numerical_rank(p.X, 1e-10), c.num_bs_antennas);
}

TEST(Synthesize, ScalarCase) {
  model::ChannelRealization ch{ComplexMatrix::Constant(1, 1, 3.0), ComplexMatrix::Constant(1, 1, 2.0)};
  model::PilotSet p{ComplexMatrix::Constant(1, 1, 1.0), ComplexMatrix::Constant(1, 1, 1.0)};
  model::Rng rng(1);
  const auto obs = model::synthesize(ch, p, 0.0, rng);
  EXPECT_EQ(obs.Y(0, 0), cplx(6.0, 0.0));
}

TEST(Synthesize, AllOffPatternGivesZero) {
  const SystemConfig c = small_config();
  model::Rng rng(2);
  const auto ch = model::draw_channels(c, rng);
  auto p = model::draw_pilots(c, rng);
  p.S.setZero();
  const auto obs = model::synthesize(ch, p, 0.0, rng);
  EXPECT_EQ(obs.Y.norm(), 0.0);
  EXPECT_EQ(obs.Z.norm(), 0.0);
}

TEST(Synthesize, NoiselessReconstructionAndExactZeros) {
  const SystemConfig c = small_config();
  model::Rng rng(4);
  const auto ch = model::draw_channels(c, rng);
  const auto p = model::draw_pilots(c, rng);
  const auto obs = model::synthesize(ch, p, 0.0, rng);
  EXPECT_LE((obs.Y - ch.G * obs.Z).norm(), 1e-12 * obs.Y.norm());
  const ComplexMatrix HX = ch.H * p.X;
  for (Eigen::Index t = 0; t < obs.Z.cols(); ++t)
    for (Eigen::Index n = 0; n < obs.Z.rows(); ++n) {
      if (p.S(n, t) == cplx(0.0, 0.0))
        EXPECT_EQ(obs.Z(n, t), cplx(0.0, 0.0));
      else
        EXPECT_LE(std::abs(obs.Z(n, t) - HX(n, t)), 1e-12 * (1.0 + std::abs(HX(n, t))));
    }
}

TEST(Synthesize, EmpiricalNoisePower) {
  const SystemConfig c = small_config();
  const double sigma2 = 0.25;
  model::Rng rng(5);
  const auto ch = model::draw_channels(c, rng);
  const auto p = model::draw_pilots(c, rng);
  const auto clean = model::synthesize(ch, p, 0.0, rng);
  const int reps = 50;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const auto noisy = model::synthesize(ch, p, sigma2, rng);
    const double power = (noisy.Y - clean.Y).squaredNorm() / static_cast<double>(clean.Y.size());
    acc += power;
    acc2 += power * power;
  }
  const double mean = acc / reps;
  const double se = std::sqrt((acc2 / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, sigma2, 3.0 * se + 1e-12);
}

TEST(Synthesize, RejectsIncompatibleShapes) {
  model::ChannelRealization ch{ComplexMatrix::Ones(4, 3), ComplexMatrix::Ones(2, 4)};
  model::PilotSet p{ComplexMatrix::Ones(4, 6), ComplexMatrix::Ones(2, 6)};
  model::Rng rng(1);
  EXPECT_THROW(model::synthesize(ch, p, 0.0, rng), ConfigError);
}

TEST(Seeds, StreamsAreReproducibleAndDistinct) {
  model::RngStreams a(42), b(42), c(43);
  EXPECT_EQ(a.channel(), b.channel());
  EXPECT_NE(a.pilot(), c.pilot());
  EXPECT_NE(model::derive_seed(1, 1), model::derive_seed(1, 2));
  EXPECT_NE(model::derive_seed(1, 1, 2), model::derive_seed(1, 2, 1));
}
