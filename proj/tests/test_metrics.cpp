#include <gtest/gtest.h>

#include <cmath>

#include "slidemimo/metrics.hpp"

using namespace slidemimo;

TEST(Ebn0, NoiseVariance) {
  EXPECT_DOUBLE_EQ(ebn0_to_noise_var(0.0, 16), 0.25);
  EXPECT_DOUBLE_EQ(ebn0_to_noise_var(0.0, 4), 0.5);
  EXPECT_NEAR(ebn0_to_noise_var(6.02, 16), 0.0625, 1e-4);
  EXPECT_THROW(ebn0_to_noise_var(0.0, 2), std::invalid_argument);
}

TEST(Sinr, KnownErrorPower) {
  CMatrix truth = CMatrix::Ones(2, 100);
  CMatrix soft = truth;
  soft.row(0).array() += cd(0.1, 0.0);   // MSE 0.01 -> 20 dB
  const auto s = measure_sinr(soft, truth);
  EXPECT_NEAR(s[0], 20.0, 1e-9);
  EXPECT_TRUE(std::isinf(s[1]) && s[1] > 0);
  EXPECT_THROW(measure_sinr(soft.leftCols(5), truth), std::invalid_argument);
}

TEST(Sir, OnlyForNoiselessRuns) {
  const CMatrix x = CMatrix::Ones(1, 4);
  EXPECT_NO_THROW(measure_sir(x, x, 0.0));
  EXPECT_THROW(measure_sir(x, x, 0.1), std::invalid_argument);
}

TEST(Ber, HammingDistance) {
  const Bits a{0, 1, 1, 0}, b{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(measure_ber(a, b), 0.5);
  EXPECT_THROW(measure_ber(a, Bits{0}), std::invalid_argument);
}

TEST(LinkTally, UsersAveragedInLinearScale) {
  LinkTally t(2);
  t.error_power = {0.1, 0.001};  // 10 dB and 30 dB
  t.symbols = {1, 1};
  t.frames = 1;
  const auto per_user = t.per_user_sinr_db();
  EXPECT_NEAR(per_user[0], 10.0, 1e-12);
  EXPECT_NEAR(per_user[1], 30.0, 1e-12);
  EXPECT_NEAR(t.mean_sinr_db(), 10.0 * std::log10((10.0 + 1000.0) / 2.0), 1e-12);
}

TEST(LinkTally, MergeAddsCounts) {
  LinkTally a(1), b(1);
  a.error_power = {1.0};
  a.symbols = {10};
  a.bits = 40;
  a.bit_errors = 2;
  a.frames = 1;
  b = a;
  b.failed_frames = 1;
  a.merge(b);
  EXPECT_EQ(a.symbols[0], 20u);
  EXPECT_EQ(a.bits, 80u);
  EXPECT_EQ(a.frames, 2);
  EXPECT_EQ(a.failed_frames, 1);
  EXPECT_DOUBLE_EQ(a.ber(), 0.05);
  EXPECT_THROW(a.merge(LinkTally(3)), std::invalid_argument);
}
