#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slidemimo/detection.hpp"
#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

/// Mean squared symbol error at or below this value is reported as an
/// infinite SINR (the residual is numerical round-off only).
inline constexpr double kZeroErrorPower = 1e-20;

/// Noise variance per frequency-domain sample for unit symbol energy:
/// 1 / (log2(order) * 10^(ebn0/10)). CP energy is not counted.
double ebn0_to_noise_var(double ebn0_db, int constellation_order);

/// Per-user SINR 10 log10(1 / E|x_hat - x|^2) over the columns of K x N
/// blocks; +infinity when the error power vanishes.
std::vector<double> measure_sinr(const Eigen::Ref<const CMatrix>& soft,
                                 const Eigen::Ref<const CMatrix>& truth);

/// measure_sinr for a noiseless run; throws std::invalid_argument if
/// noise_var != 0.
std::vector<double> measure_sir(const Eigen::Ref<const CMatrix>& soft,
                                const Eigen::Ref<const CMatrix>& truth, double noise_var);

/// Hamming distance over total bits. Throws on length mismatch.
double measure_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth);

/// Accumulated symbol-error and bit-error statistics of one receiver.
struct LinkTally {
  std::vector<double> error_power;      // per user, sum |x_hat - x|^2
  std::vector<std::uint64_t> symbols;   // per user
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  int frames = 0;
  int failed_frames = 0;

  explicit LinkTally(int users = 0) : error_power(users, 0.0), symbols(users, 0) {}

  void merge(const LinkTally& other);

  std::vector<double> per_user_sinr_db() const;
  /// Per-user SINR averaged in linear scale, then converted to dB.
  double mean_sinr_db() const;
  double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

/// Scores one frame against the transmitted user frames over data REs only.
/// A failed detection only bumps failed_frames.
LinkTally score_frame(const DetectionResult& result, std::span<const UserFrame> frames,
                      const Constellation& constellation);

}  // namespace slidemimo
