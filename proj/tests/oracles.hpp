// Independent reference implementations used as test oracles. Nothing here
// calls into the library's DFT, convolution or combining code.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "slidemimo/channel.hpp"
#include "slidemimo/pilots.hpp"
#include "slidemimo/rng.hpp"
#include "slidemimo/waveform.hpp"

namespace oracle {

using slidemimo::cd;
using slidemimo::CMatrix;

// Unnormalized O(M^2) DFT, sign -1 forward.
inline std::vector<cd> dft(const std::vector<cd>& x, int sign = -1) {
  const std::size_t m = x.size();
  std::vector<cd> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    cd acc{};
    for (std::size_t n = 0; n < m; ++n) {
      const double phase = sign * 2.0 * std::numbers::pi * static_cast<double>((k * n) % m) /
                           static_cast<double>(m);
      acc += x[n] * std::polar(1.0, phase);
    }
    out[k] = acc;
  }
  return out;
}

// lambda[m] for a CIR zero-padded to M.
inline std::vector<cd> cfr(const std::vector<cd>& h, int m) {
  std::vector<cd> padded(m);
  for (std::size_t l = 0; l < h.size(); ++l) padded[l] = h[l];
  return dft(padded);
}

// Time-domain uplink: per-user CP-OFDM with direct IDFT, linear convolution
// with each CIR, sum over users, CP removal, direct DFT. Returns per-antenna
// M x N grids.
inline std::vector<CMatrix> time_domain_uplink(const std::vector<CMatrix>& user_grids,
                                               const slidemimo::ChannelRealization& ch,
                                               int cp) {
  const int m = static_cast<int>(user_grids[0].rows());
  const int n_sym = static_cast<int>(user_grids[0].cols());
  const int block = m + cp;
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));

  std::vector<std::vector<cd>> tx(user_grids.size(), std::vector<cd>(block * n_sym));
  for (std::size_t k = 0; k < user_grids.size(); ++k)
    for (int n = 0; n < n_sym; ++n) {
      std::vector<cd> col(m);
      for (int i = 0; i < m; ++i) col[i] = user_grids[k](i, n);
      auto t = dft(col, +1);
      for (int i = 0; i < block; ++i) tx[k][n * block + i] = t[(i - cp + m) % m] * norm;
    }

  std::vector<CMatrix> out;
  for (int q = 0; q < ch.antennas; ++q) {
    std::vector<cd> rx(block * n_sym);
    for (std::size_t k = 0; k < user_grids.size(); ++k)
      for (std::size_t t = 0; t < rx.size(); ++t)
        for (int l = 0; l < ch.length && static_cast<std::size_t>(l) <= t; ++l)
          rx[t] += ch.tap(q, static_cast<int>(k), l) * tx[k][t - l];
    CMatrix grid(m, n_sym);
    for (int n = 0; n < n_sym; ++n) {
      std::vector<cd> col(rx.begin() + n * block + cp, rx.begin() + (n + 1) * block);
      auto f = dft(col);
      for (int i = 0; i < m; ++i) grid(i, n) = f[i] * norm;
    }
    out.push_back(std::move(grid));
  }
  return out;
}

// Exhaustive nearest constellation point.
inline cd nearest_point(cd soft, const std::vector<cd>& points) {
  cd best = points.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (cd p : points) {
    const double d = std::norm(soft - p);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

// Textbook MMSE combiner with an explicit inverse.
inline CMatrix mmse(const CMatrix& lam, const CMatrix& b, double noise_var) {
  const auto k = lam.cols();
  CMatrix a = lam.adjoint() * lam - b + noise_var * CMatrix::Identity(k, k);
  return a.fullPivLu().inverse() * lam.adjoint();
}

inline CMatrix random_matrix(int rows, int cols, slidemimo::Rng& rng, double var = 1.0) {
  slidemimo::ComplexGaussian g(var);
  CMatrix out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) out(r, c) = g(rng);
  return out;
}

}  // namespace oracle

namespace testutil {

// Random user frames for one trial, filled the way the experiment harness does.
inline std::vector<slidemimo::UserFrame> make_frames(const slidemimo::PilotPlacement& placement,
                                                     const slidemimo::PilotBook& book,
                                                     const slidemimo::SystemConfig& config,
                                                     const slidemimo::Constellation& constellation,
                                                     std::uint64_t trial) {
  using namespace slidemimo;
  const StreamSeeder seeder(config.seed);
  const auto bits_needed = static_cast<std::size_t>(data_re_count(placement, config)) *
                           constellation.bits_per_symbol();
  std::vector<Bits> bits;
  for (int k = 0; k < config.users; ++k) {
    Rng rng = seeder.stream(StreamTag::kTest, {trial, static_cast<std::uint64_t>(k)});
    bits.push_back(random_bits(bits_needed, rng));
  }
  return build_frames(placement, book, bits, config, constellation);
}

}  // namespace testutil
