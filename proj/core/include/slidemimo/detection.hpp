#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

enum class EstimateSource { kPilot, kVirtualPilot, kInterpolated };

/// Channel estimate at one subcarrier.
///
/// noise_mitigation is the K x K term B subtracted from Lambda^H Lambda when
/// forming MRC/MMSE normalizations, so combiners do not need to know where
/// the estimate came from.
struct ChannelEstimate {
  CMatrix lambda_hat;        // Q x K
  CMatrix noise_mitigation;  // K x K, Hermitian PSD
  EstimateSource source = EstimateSource::kPilot;
};

using LabelMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Receiver output for one frame. Per-subcarrier K x N blocks are stored
/// side by side in K x (M*N) matrices.
struct DetectionResult {
  int subcarriers = 0;
  int users = 0;
  int slots = 0;
  CMatrix soft;
  CMatrix hard;
  LabelMatrix labels;
  std::vector<std::optional<ChannelEstimate>> estimates;  // per subcarrier
  bool failed = false;

  DetectionResult() = default;
  DetectionResult(int m, int k, int n)
      : subcarriers(m),
        users(k),
        slots(n),
        soft(CMatrix::Zero(k, static_cast<Eigen::Index>(m) * n)),
        hard(CMatrix::Zero(k, static_cast<Eigen::Index>(m) * n)),
        labels(LabelMatrix::Zero(k, static_cast<Eigen::Index>(m) * n)),
        estimates(m) {}

  auto soft_at(int m) { return soft.middleCols(m * slots, slots); }
  auto soft_at(int m) const { return soft.middleCols(m * slots, slots); }
  auto hard_at(int m) const { return hard.middleCols(m * slots, slots); }

  /// Fills hard/labels from soft by nearest-point decisions.
  void decide(const Constellation& constellation);
};

}  // namespace slidemimo
