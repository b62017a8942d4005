#include <benchmark/benchmark.h>

#include "slidemimo/baseline_rx.hpp"
#include "slidemimo/sliding_rx.hpp"

using namespace slidemimo;

namespace {

struct Link {
  SystemConfig cfg;
  Constellation qam{16};
  PilotBook book = zc_pilot_book(7, 7, 1);
  std::vector<SampledPdp> pdp;
  ChannelRealization channel;

  explicit Link(int antennas) {
    cfg.antennas = antennas;
    pdp.assign(cfg.users, sample_pdp(etu_model(), cfg.sample_rate()));
    channel = draw_channel(pdp, antennas, StreamSeeder(cfg.seed), 0);
  }

  std::vector<UserFrame> frames(const PilotPlacement& placement) const {
    const std::size_t n = static_cast<std::size_t>(data_re_count(placement, cfg)) * 4;
    std::vector<Bits> bits;
    for (int k = 0; k < cfg.users; ++k) {
      Rng rng = StreamSeeder(cfg.seed).stream(StreamTag::kBits, {0, std::uint64_t(k)});
      bits.push_back(random_bits(n, rng));
    }
    return build_frames(placement, book, bits, cfg, qam);
  }
};

void BM_Propagate(benchmark::State& state) {
  Link link(static_cast<int>(state.range(0)));
  const auto frames = link.frames(single_subcarrier_placement(link.cfg));
  const StreamSeeder seeder(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(propagate(frames, link.channel, link.cfg, seeder, 0));
}
BENCHMARK(BM_Propagate)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_MmseFilter(benchmark::State& state) {
  Rng rng(3);
  ComplexGaussian g;
  ChannelEstimate est;
  est.lambda_hat.resize(state.range(0), 7);
  for (Eigen::Index i = 0; i < est.lambda_hat.size(); ++i) est.lambda_hat.data()[i] = g(rng);
  est.noise_mitigation = CMatrix::Identity(7, 7);
  for (auto _ : state) benchmark::DoNotOptimize(mmse_filter(est, 1.0));
}
BENCHMARK(BM_MmseFilter)->Arg(64)->Arg(200);

void BM_Conventional(benchmark::State& state) {
  Link link(static_cast<int>(state.range(0)));
  const int l_taps = link.pdp[0].length();
  const auto placement = conventional_placement(link.cfg, l_taps);
  const CirInterpolator interp(link.cfg.subcarriers, placement.pilot_subcarriers, l_taps);
  const auto grid =
      propagate(link.frames(placement), link.channel, link.cfg, StreamSeeder(1), 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_conventional(grid, placement, link.book, interp,
                                              link.cfg.noise_var, Combiner::kMmse, link.qam));
}
BENCHMARK(BM_Conventional)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Sliding(benchmark::State& state) {
  Link link(200);
  link.cfg.depth = static_cast<int>(state.range(0));
  const auto placement = single_subcarrier_placement(link.cfg);
  const AlphaTable alpha(link.pdp, link.cfg.subcarriers, AlphaMode::kExactPdp,
                         link.cfg.subcarrier_spacing);
  const auto grid =
      propagate(link.frames(placement), link.channel, link.cfg, StreamSeeder(1), 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_sliding(grid, placement, link.book, alpha, link.cfg));
}
BENCHMARK(BM_Sliding)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
