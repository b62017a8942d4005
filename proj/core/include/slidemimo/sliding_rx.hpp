#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "slidemimo/channel.hpp"
#include "slidemimo/detection.hpp"
#include "slidemimo/pilots.hpp"
#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

/// Inter-subcarrier CFR correlation E{lambda*_m lambda_{m+dm}} for a known
/// PDP: sum_l rho[l] exp(-j2pi dm l / M).
cd alpha_exact(const SampledPdp& pdp, long long offset, int subcarriers);

/// Coherence-bandwidth approximation sqrt(1 - (delta_f dm / F_c)^2), phase
/// taken as zero. Throws std::domain_error when |delta_f dm| > F_c.
double alpha_approx(double subcarrier_spacing, long long offset, double coherence_bw);

enum class AlphaMode { kExactPdp, kCoherenceApprox };

/// alpha_{dm,k} for every user and every offset modulo M.
///
/// In approximate mode the offset is reduced to its smallest magnitude
/// representative; offsets beyond the coherence bandwidth map to 0 so the
/// small-alpha guard rejects them.
class AlphaTable {
 public:
  AlphaTable(std::span<const SampledPdp> pdp_per_user, int subcarriers, AlphaMode mode,
             double subcarrier_spacing);

  cd operator()(int user, long long offset) const {
    return table_[user][wrap_index(offset, subcarriers_)];
  }
  int users() const { return static_cast<int>(table_.size()); }
  int subcarriers() const { return subcarriers_; }
  AlphaMode mode() const { return mode_; }

 private:
  int subcarriers_;
  AlphaMode mode_;
  std::vector<std::vector<cd>> table_;
};

/// Raised when a 1/alpha scaling would fall under the alpha_min guard.
class AlphaGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scales row k by 1/alpha(k, offset). Throws AlphaGuardError if any
/// |alpha| < alpha_min.
void apply_inverse_alpha(CMatrix& rows, const AlphaTable& alpha, long long offset,
                         double alpha_min);

/// MRC at subcarrier m with the estimate from m' = m - offset, rescaled by
/// Psi_offset^-1.
CMatrix cross_combine_mrc(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& source,
                          const AlphaTable& alpha, long long offset, double alpha_min = 0.1);

/// Psi_offset^-1 Phi_source Y: MMSE with a neighbouring subcarrier's estimate,
/// where offset = m - source. Throws std::invalid_argument if the source
/// estimate is missing.
CMatrix sliding_mmse_step(const Eigen::Ref<const CMatrix>& rx,
                          const std::optional<ChannelEstimate>& source,
                          const AlphaTable& alpha, long long offset, double noise_var,
                          double alpha_min = 0.1);

/// Re-estimates the channel from hard-decided symbols used as pilots:
/// Lambda_hat = Y X^H (X X^H)^-1, noise_mitigation = Q sigma^2 (X X^H)^-1.
/// Returns nullopt when X's smallest singular value is below rank_tol times
/// its largest.
std::optional<ChannelEstimate> virtual_pilot_update(const Eigen::Ref<const CMatrix>& rx,
                                                    const Eigen::Ref<const CMatrix>& decided,
                                                    double noise_var, double rank_tol = 1e-6);

struct SlidingOptions {
  double alpha_min = 0.1;
  double rank_tol = 1e-6;
};

/// Sliding joint estimation and equalization from one reference pilot
/// subcarrier.
///
/// Two independent passes walk away from the reference index, downward and
/// upward modulo M. Each subcarrier is equalized by averaging the MMSE
/// outputs obtained with every estimate available within config.depth
/// subcarriers behind it (falling back to the latest estimate when none is),
/// then re-estimated from its own hard decisions. The two passes are
/// averaged. Depth 0 runs the upward pass only.
///
/// The returned estimates are those of the upward pass. If the anchor
/// fallback ever trips the alpha guard the result is marked failed.
DetectionResult run_sliding(const SpaceTimeGrid& grid, const PilotPlacement& placement,
                            const PilotBook& book, const AlphaTable& alpha,
                            const SystemConfig& config, const SlidingOptions& options = {});

}  // namespace slidemimo
