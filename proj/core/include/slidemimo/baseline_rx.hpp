#pragma once

#include <span>
#include <vector>

#include "slidemimo/detection.hpp"
#include "slidemimo/pilots.hpp"
#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

/// LS estimate from the Q x N_p pilot block: Lambda_hat = Y_p P^H / N_p, with
/// noise_mitigation = (Q sigma^2 / N_p^2) P P^H.
ChannelEstimate ls_estimate(const Eigen::Ref<const CMatrix>& pilot_rx, const PilotBook& book,
                            double noise_var);

/// Recovers the L-tap CIR from CFR samples at L pilot subcarriers and
/// re-expands it to all M subcarriers.
///
/// The factorization of the pilot DFT submatrix is computed once. Each
/// interpolated estimate carries the pilot noise_mitigation scaled by the
/// noise gain ||g_m||^2 of its interpolation weights, which is 1 at the pilot
/// subcarriers and for exactly equispaced grids.
class CirInterpolator {
 public:
  CirInterpolator(int subcarriers, std::vector<int> pilot_indices, int channel_length);

  int subcarriers() const { return subcarriers_; }
  int channel_length() const { return static_cast<int>(pilot_indices_.size()); }
  const std::vector<int>& pilot_indices() const { return pilot_indices_; }
  const std::vector<double>& noise_gain() const { return noise_gain_; }

  /// CIR taps (L x columns) from CFR samples at the pilots (L x columns).
  CMatrix solve_cir(const CMatrix& cfr_at_pilots) const;

  std::vector<ChannelEstimate> reconstruct(std::span<const ChannelEstimate> at_pilots) const;

 private:
  int subcarriers_;
  std::vector<int> pilot_indices_;
  Eigen::PartialPivLU<CMatrix> lu_;
  std::vector<double> noise_gain_;
};

/// One-shot form of CirInterpolator::reconstruct.
std::vector<ChannelEstimate> reconstruct_cfr(std::span<const ChannelEstimate> at_pilots,
                                             std::span<const int> pilot_indices,
                                             int subcarriers, int channel_length);

inline constexpr double kGammaFloor = 1e-9;

/// MRC: Gamma^-1 Lambda_hat^H Y, Gamma = diag(Lambda_hat^H Lambda_hat - B).
/// Gamma entries are floored at gamma_floor * Q.
CMatrix mrc_combine(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& estimate,
                    double gamma_floor = kGammaFloor);

/// K x Q MMSE combiner (Lambda_hat^H Lambda_hat - B + sigma^2 I)^-1 Lambda_hat^H.
/// A tiny ridge is added if the K x K matrix is numerically singular; throws
/// std::runtime_error if it stays singular.
CMatrix mmse_filter(const ChannelEstimate& estimate, double noise_var);

CMatrix mmse_combine(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& estimate,
                     double noise_var);

enum class Combiner { kMrc, kMmse };

/// Conventional receiver over a whole frame: LS at the L pilot subcarriers,
/// CIR interpolation, then per-subcarrier MRC or MMSE over all N symbols.
DetectionResult run_conventional(const SpaceTimeGrid& grid, const PilotPlacement& placement,
                                 const PilotBook& book, const CirInterpolator& interpolator,
                                 double noise_var, Combiner combiner,
                                 const Constellation& constellation);

}  // namespace slidemimo
