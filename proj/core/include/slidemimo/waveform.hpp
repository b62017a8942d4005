#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slidemimo/rng.hpp"

#include "slidemimo/types.hpp"

namespace slidemimo {

/// Dimensioning and physics parameters of one uplink frame.
struct SystemConfig {
  int subcarriers = 1024;            // M
  int cp_length = 80;                // M_CP, samples
  int users = 7;                     // K
  int antennas = 200;                // Q
  int pilot_slots = 7;               // N_p
  int data_slots = 7;                // N_d
  double subcarrier_spacing = 15e3;  // Hz
  double noise_var = 1.0;            // per frequency-domain sample
  int depth = 3;                     // sliding depth D
  int constellation_order = 16;
  std::uint64_t seed = 1;

  int frame_length() const { return pilot_slots + data_slots; }
  double sample_rate() const { return subcarriers * subcarrier_spacing; }

  /// Throws std::invalid_argument if the configuration is inconsistent.
  void validate() const;
  /// Throws std::invalid_argument if an L-tap channel does not fit the CP.
  void validate_channel_length(int channel_length) const;
};

/// Square QAM with Gray labels and unit average energy.
///
/// Points are indexed by their label value. The first half of a label's bits
/// (most significant first) selects the in-phase level, the second half the
/// quadrature level. That index is the canonical order used to break ties.
class Constellation {
 public:
  explicit Constellation(int order);

  int order() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_per_symbol_; }
  const std::vector<cd>& points() const { return points_; }
  cd point(unsigned label) const { return points_[label]; }

  /// Nearest point by per-axis slicing; exact ties go to the smaller label.
  unsigned nearest_label(cd soft) const;

 private:
  unsigned slice_axis(double x) const;

  int bits_per_symbol_ = 0;
  int bits_per_axis_ = 0;
  double scale_ = 1.0;
  std::vector<double> axis_levels_;     // ascending
  std::vector<unsigned> axis_labels_;   // label of axis_levels_[j]
  std::vector<cd> points_;
};

struct HardDecision {
  cd point;
  unsigned label;
};

/// Maps groups of bits_per_symbol bits (MSB first) onto constellation points.
std::vector<cd> map_bits(std::span<const std::uint8_t> bits,
                         const Constellation& constellation);

HardDecision hard_decision(cd soft, const Constellation& constellation);

/// Appends the bits of a label, most significant first.
void append_label_bits(unsigned label, int bits_per_symbol, Bits& out);

/// Uniform random bits.
Bits random_bits(std::size_t count, Rng& rng);

/// One user's time-frequency grid X^k = [P^k, D^k].
struct UserFrame {
  CMatrix symbols;                    // M x N
  std::vector<std::uint8_t> pilot_mask;  // M*N, index m*N + n
  Bits bits;                          // data bits, subcarrier-major RE order

  bool is_pilot(int m, int n) const {
    return pilot_mask[static_cast<std::size_t>(m) * symbols.cols() + n] != 0;
  }
};

/// Received frequency-domain samples, M x Q x N.
///
/// Stored as a Q x (M*N) matrix so that the per-subcarrier space-time matrix
/// is a contiguous column block.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid() = default;
  SpaceTimeGrid(int subcarriers, int antennas, int slots);

  int subcarriers() const { return subcarriers_; }
  int antennas() const { return static_cast<int>(data_.rows()); }
  int slots() const { return slots_; }

  auto subcarrier(int m) { return data_.middleCols(m * slots_, slots_); }
  auto subcarrier(int m) const { return data_.middleCols(m * slots_, slots_); }

  cd& at(int m, int q, int n) { return data_(q, m * slots_ + n); }
  cd at(int m, int q, int n) const { return data_(q, m * slots_ + n); }

  CMatrix& data() { return data_; }
  const CMatrix& data() const { return data_; }

 private:
  int subcarriers_ = 0;
  int slots_ = 0;
  CMatrix data_;
};

/// CP-OFDM modulation of an M x N grid: unitary IDFT per column, then the
/// last cp_length samples are prepended. Output length N*(M+cp_length).
std::vector<cd> ofdm_modulate(const CMatrix& grid, int cp_length);
std::vector<cd> ofdm_modulate(const UserFrame& frame, const SystemConfig& config);

/// Inverse of ofdm_modulate: drop the CP, unitary DFT per symbol.
CMatrix ofdm_demodulate(std::span<const cd> samples, const SystemConfig& config);

/// Gathers Q per-antenna M x N grids into the space-time layout.
SpaceTimeGrid assemble_space_time(std::span<const CMatrix> per_antenna);

}  // namespace slidemimo
