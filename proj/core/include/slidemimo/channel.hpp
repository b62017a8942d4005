#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slidemimo/rng.hpp"
#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

/// Tapped-delay-line power delay profile before sampling.
struct PdpModel {
  std::string name;
  std::vector<double> delays;     // seconds, strictly increasing, >= 0
  std::vector<double> powers_db;  // relative tap power

  void validate() const;
};

/// LTE Extended Typical Urban profile.
PdpModel etu_model();
/// LTE Extended Pedestrian A profile.
PdpModel epa_model();
/// LTE Extended Vehicular A profile.
PdpModel eva_model();

std::vector<PdpModel> builtin_pdp_models();
/// Case-insensitive lookup among the built-in models.
PdpModel builtin_pdp(std::string_view name);

/// Parses "name, delay_ns, power_db" lines. Blank lines and '#' comments are
/// skipped; consecutive rows with the same name form one model.
std::vector<PdpModel> parse_pdp_table(std::istream& in);
std::vector<PdpModel> load_pdp_table(const std::string& path);

/// Normalized per-sample tap variances rho[0..L-1], sum(rho) = 1.
struct SampledPdp {
  std::vector<double> rho;

  int length() const { return static_cast<int>(rho.size()); }
};

/// Places each tap at sample floor(delay * sample_rate), sums coinciding taps
/// in linear power and normalizes to unit total power.
SampledPdp sample_pdp(const PdpModel& model, double sample_rate);

/// CIR taps h_{q,k}[l] for every antenna/user pair.
struct ChannelRealization {
  int antennas = 0;
  int users = 0;
  int length = 0;                // L, longest user profile
  std::vector<cd> taps;          // ((q * K) + k) * L + l
  std::vector<SampledPdp> pdp;   // per user

  cd& tap(int q, int k, int l) {
    return taps[(static_cast<std::size_t>(q) * users + k) * length + l];
  }
  cd tap(int q, int k, int l) const {
    return taps[(static_cast<std::size_t>(q) * users + k) * length + l];
  }
  std::span<const cd> cir(int q, int k) const {
    return {taps.data() + (static_cast<std::size_t>(q) * users + k) * length,
            static_cast<std::size_t>(length)};
  }
};

/// Draws h_{q,k} ~ CN(0, diag(rho_k)), independent over q, k and l. Each
/// (trial, antenna, user) pair reads its own substream.
ChannelRealization draw_channel(std::span<const SampledPdp> pdp_per_user, int antennas,
                                const StreamSeeder& seeder, std::uint64_t trial);

/// Per-subcarrier channel matrices, stored Q x (M*K).
class CfrTensor {
 public:
  CfrTensor() = default;
  CfrTensor(int subcarriers, int antennas, int users);

  int subcarriers() const { return subcarriers_; }
  int antennas() const { return static_cast<int>(data_.rows()); }
  int users() const { return users_; }

  auto at(int m) { return data_.middleCols(m * users_, users_); }
  auto at(int m) const { return data_.middleCols(m * users_, users_); }
  cd lambda(int m, int q, int k) const { return data_(q, m * users_ + k); }

  CMatrix& data() { return data_; }
  const CMatrix& data() const { return data_; }

 private:
  int subcarriers_ = 0;
  int users_ = 0;
  CMatrix data_;
};

/// lambda_{q,k}[m] = sum_l h_{q,k}[l] exp(-j2pi ml/M).
CfrTensor cir_to_cfr(const ChannelRealization& realization, int subcarriers);

enum class PropagationPath {
  kFrequency,  // Y_m = Lambda_m X_m + W_m
  kTime,       // CP-OFDM, linear convolution, AWGN, demodulation
};

/// Noiseless frequency-domain propagation Lambda_m X_m for every subcarrier.
SpaceTimeGrid apply_cfr(std::span<const UserFrame> frames, const CfrTensor& cfr);

/// Frequency-domain AWGN grid, CN(0, noise_var) per sample, one substream per
/// (trial, antenna).
SpaceTimeGrid draw_noise(int subcarriers, int antennas, int slots, double noise_var,
                         const StreamSeeder& seeder, std::uint64_t trial);

/// Full uplink propagation of K user frames to Q antennas.
SpaceTimeGrid propagate(std::span<const UserFrame> frames,
                        const ChannelRealization& realization,
                        const SystemConfig& config, const StreamSeeder& seeder,
                        std::uint64_t trial,
                        PropagationPath path = PropagationPath::kFrequency);

/// 1 / maximum delay spread, with the spread taken as (L-1)/f_s. Returns
/// +infinity for a single-tap (flat) profile.
double coherence_bandwidth(const SampledPdp& pdp, double sample_rate);

}  // namespace slidemimo
