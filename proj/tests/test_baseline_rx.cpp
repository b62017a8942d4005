#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "slidemimo/baseline_rx.hpp"

using namespace slidemimo;

namespace {

ChannelEstimate perfect(const CMatrix& lam) {
  return {lam, CMatrix::Zero(lam.cols(), lam.cols()), EstimateSource::kPilot};
}

}  // namespace

TEST(LsEstimate, NoiselessIsExactAndNoiseTermMatchesBook) {
  Rng rng(1);
  const PilotBook book = zc_pilot_book(7, 7, 1);
  const CMatrix lam = oracle::random_matrix(32, 7, rng);
  const ChannelEstimate est = ls_estimate(lam * book.matrix, book, 0.3);
  EXPECT_LT((est.lambda_hat - lam).cwiseAbs().maxCoeff(), 1e-12);
  const CMatrix expect = (32 * 0.3 / 7.0) * CMatrix::Identity(7, 7);
  EXPECT_LT((est.noise_mitigation - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LsEstimate, UnbiasedAndNoiseTermCancelsNormInflation) {
  Rng rng(2);
  const PilotBook book = zc_pilot_book(7, 3, 1);
  const int q = 64;
  const double s2 = 0.5;
  const CMatrix lam = oracle::random_matrix(q, 3, rng);
  const int trials = 4000;
  CMatrix mean = CMatrix::Zero(q, 3);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(3);
  for (int t = 0; t < trials; ++t) {
    const CMatrix y = lam * book.matrix + oracle::random_matrix(q, 7, rng, s2);
    const auto est = ls_estimate(y, book, s2);
    mean += est.lambda_hat;
    diag += (est.lambda_hat.adjoint() * est.lambda_hat - est.noise_mitigation)
                .diagonal()
                .real();
  }
  mean /= trials;
  diag /= trials;
  // Per-entry estimate std is sqrt(s2 / N_p / trials).
  EXPECT_LT((mean - lam).cwiseAbs().maxCoeff(), 4.5 * std::sqrt(s2 / 7.0 / trials));
  for (int k = 0; k < 3; ++k) {
    const double truth = lam.col(k).squaredNorm();
    EXPECT_NEAR(diag(k), truth, 5.0 * std::sqrt(4.0 * truth * s2 / 7.0 / trials) + 0.05);
  }
}

TEST(Interpolation, SmallGridRoundTrip) {
  Rng rng(3);
  const std::vector<int> idx{0, 2, 4, 6};
  CirInterpolator interp(8, idx, 4);
  const CMatrix h = oracle::random_matrix(4, 2, rng);
  CMatrix at(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 2; ++c) {
      cd acc{};
      for (int l = 0; l < 4; ++l)
        acc += h(l, c) * std::polar(1.0, -2.0 * std::numbers::pi * idx[i] * l / 8.0);
      at(i, c) = acc;
    }
  EXPECT_LT((interp.solve_cir(at) - h).cwiseAbs().maxCoeff(), 1e-10);
  for (double g : interp.noise_gain()) EXPECT_NEAR(g, 1.0, 1e-12);
}

TEST(Interpolation, FlatChannel) {
  const CMatrix v = CMatrix::Constant(5, 2, cd(0.3, -1.1));
  const std::vector<ChannelEstimate> at{perfect(v)};
  const auto all = reconstruct_cfr(at, std::vector<int>{0}, 16, 1);
  ASSERT_EQ(all.size(), 16u);
  for (const auto& e : all) EXPECT_LT((e.lambda_hat - v).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Interpolation, EtuChannelReconstructsExactly) {
  const SampledPdp s = sample_pdp(etu_model(), 15.36e6);
  const std::vector<SampledPdp> pdp(2, s);
  const auto cfr = cir_to_cfr(draw_channel(pdp, 4, StreamSeeder(12), 0), 1024);
  const auto idx = conventional_pilot_indices(1024, 77);
  std::vector<ChannelEstimate> at;
  for (int m : idx) at.push_back(perfect(cfr.at(m)));
  const auto all = reconstruct_cfr(at, idx, 1024, 77);
  double worst = 0.0;
  for (int m = 0; m < 1024; ++m)
    worst = std::max(worst, (all[m].lambda_hat - cfr.at(m)).cwiseAbs().maxCoeff());
  EXPECT_LE(worst, 1e-8);
}

TEST(Interpolation, NoiseGainIsUnityAtPilots) {
  CirInterpolator interp(1024, conventional_pilot_indices(1024, 77), 77);
  double mean = 0.0;
  for (int m = 0; m < 1024; ++m) mean += interp.noise_gain()[m];
  for (int m : interp.pilot_indices()) EXPECT_NEAR(interp.noise_gain()[m], 1.0, 1e-9);
  EXPECT_NEAR(mean / 1024, 1.0, 0.02);
}

TEST(Mrc, PerfectCsiSingleUser) {
  Rng rng(4);
  const CMatrix lam = oracle::random_matrix(6, 1, rng);
  const CMatrix x = oracle::random_matrix(1, 5, rng);
  const CMatrix out = mrc_combine(lam * x, perfect(lam));
  EXPECT_LT((out - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mrc, HardeningAtLargeQ) {
  Rng rng(5);
  const int q = 2048;
  const CMatrix lam = oracle::random_matrix(q, 4, rng);
  const CMatrix eff = mrc_combine(lam, perfect(lam));  // Gamma^-1 Lambda^H Lambda
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_LT(std::abs(eff(i, j) - (i == j ? 1.0 : 0.0)), 5.0 / std::sqrt(double(q)));
}

TEST(Mrc, DegenerateGammaIsClamped) {
  const CMatrix lam = CMatrix::Zero(4, 2);
  ChannelEstimate est = perfect(lam);
  est.noise_mitigation = CMatrix::Identity(2, 2);
  const CMatrix out = mrc_combine(CMatrix::Ones(4, 3), est);
  EXPECT_TRUE(out.allFinite());
}

TEST(Mmse, ZeroForcingLimit) {
  Rng rng(6);
  const CMatrix lam = oracle::random_matrix(8, 3, rng);
  const CMatrix x = oracle::random_matrix(3, 4, rng);
  EXPECT_LT((mmse_combine(lam * x, perfect(lam), 0.0) - x).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Mmse, ScalarWiener) {
  const cd lam(0.6, -0.8), y(1.2, 0.4);
  const double s2 = 0.7;
  const CMatrix out = mmse_combine(CMatrix::Constant(1, 1, y), perfect(CMatrix::Constant(1, 1, lam)), s2);
  EXPECT_LT(std::abs(out(0, 0) - std::conj(lam) * y / (std::norm(lam) + s2)), 1e-14);
}

TEST(Mmse, MatchesTextbookWithNoiseTerm) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const CMatrix lam = oracle::random_matrix(4, 2, rng);
    CMatrix b = oracle::random_matrix(2, 2, rng, 0.05);
    b = (b * b.adjoint()).eval();
    const ChannelEstimate est{lam, b, EstimateSource::kVirtualPilot};
    EXPECT_LT((mmse_filter(est, 0.4) - oracle::mmse(lam, b, 0.4)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Mmse, LargeNoiseApproachesMrcDirection) {
  Rng rng(8);
  const CMatrix lam = oracle::random_matrix(16, 3, rng);
  const CMatrix phi = mmse_filter(perfect(lam), 1e9);
  for (int k = 0; k < 3; ++k) {
    const CVector a = phi.row(k).transpose();
    const CVector b = lam.col(k).conjugate();
    const double cosine = std::abs(a.dot(b)) / (a.norm() * b.norm());
    EXPECT_GE(cosine, 1.0 - 1e-6);
  }
}

TEST(Mmse, SingularMatrixThrows) {
  const ChannelEstimate est{CMatrix::Zero(4, 2), CMatrix::Zero(2, 2), EstimateSource::kPilot};
  EXPECT_THROW(mmse_filter(est, 0.0), std::runtime_error);
}

TEST(Conventional, NoiselessFrameIsDetectedPerfectly) {
  SystemConfig cfg;
  cfg.subcarriers = 64;
  cfg.cp_length = 8;
  cfg.users = 3;
  cfg.antennas = 16;
  cfg.pilot_slots = 3;
  cfg.data_slots = 2;
  cfg.noise_var = 0.0;
  const SampledPdp s = sample_pdp(eva_model(), cfg.sample_rate());
  const std::vector<SampledPdp> pdp(3, s);
  const Constellation qam(16);
  const PilotBook book = zc_pilot_book(3, 3, 1);
  const auto placement = conventional_placement(cfg, s.length());
  const auto frames = testutil::make_frames(placement, book, cfg, qam, 0);
  const StreamSeeder seeder(cfg.seed);
  const auto grid = propagate(frames, draw_channel(pdp, 16, seeder, 0), cfg, seeder, 0);
  CirInterpolator interp(64, placement.pilot_subcarriers, s.length());
  for (Combiner c : {Combiner::kMrc, Combiner::kMmse}) {
    const auto res = run_conventional(grid, placement, book, interp, 0.0, c, qam);
    if (c == Combiner::kMmse) {
      for (int m = 0; m < 64; ++m)
        for (int k = 0; k < 3; ++k)
          for (int n = 0; n < 5; ++n)
            EXPECT_LT(std::abs(res.soft(k, m * 5 + n) - frames[k].symbols(m, n)), 1e-8);
    }
    EXPECT_EQ(res.estimates[10]->source, EstimateSource::kInterpolated);
  }
}

TEST(Conventional, RejectsMismatchedPlacement) {
  SystemConfig cfg;
  cfg.subcarriers = 64;
  cfg.cp_length = 8;
  const auto single = single_subcarrier_placement(cfg);
  CirInterpolator interp(64, {0, 32}, 2);
  EXPECT_THROW(run_conventional(SpaceTimeGrid(64, 2, 14), single, zc_pilot_book(7, 7, 1), interp,
                                1.0, Combiner::kMmse, Constellation(16)),
               std::invalid_argument);
}
