#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slidemimo/types.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

/// K x N_p pilot matrix with P P^H = N_p I_K.
struct PilotBook {
  CMatrix matrix;
  int root = 1;

  int users() const { return static_cast<int>(matrix.rows()); }
  int length() const { return static_cast<int>(matrix.cols()); }
};

/// Rows are cyclic shifts 0..K-1 of the odd-length Zadoff-Chu root sequence
/// z[n] = exp(-j pi u n (n+1) / N_p).
PilotBook zc_pilot_book(int pilot_length, int users, int root);

enum class PilotScheme {
  kConventional,      // L pilot subcarriers, CIR interpolation
  kSingleSubcarrier,  // one reference subcarrier, sliding receiver
};

/// Which REs carry pilots. Pilots occupy the first N_p OFDM symbols of every
/// listed subcarrier.
struct PilotPlacement {
  PilotScheme scheme = PilotScheme::kSingleSubcarrier;
  std::vector<int> pilot_subcarriers;  // ascending
  int reference_index = -1;            // single-subcarrier scheme only
  int pilot_slots = 0;

  int pilot_re_count() const {
    return static_cast<int>(pilot_subcarriers.size()) * pilot_slots;
  }
  /// M*N mask, index m*N + n.
  std::vector<std::uint8_t> mask(int subcarriers, int slots) const;
};

/// Near-equispaced pilot subcarriers {round(pM/L) mod M}, collisions advanced
/// to the next free index. Throws if the resulting L x L submatrix of the
/// unitary DFT has condition number above max_condition.
std::vector<int> conventional_pilot_indices(int subcarriers, int channel_length,
                                            double max_condition = 1e6);

/// 2-norm condition number of rows `indices`, columns 0..L-1 of F_M.
double pilot_condition_number(int subcarriers, std::span<const int> indices, int channel_length);

PilotPlacement conventional_placement(const SystemConfig& config, int channel_length);

/// reference < 0 selects the mid-band subcarrier M/2.
PilotPlacement single_subcarrier_placement(const SystemConfig& config, int reference = -1);

/// Data REs per user grid: M*N minus pilot REs.
int data_re_count(const PilotPlacement& placement, const SystemConfig& config);

/// Builds the K user grids. Pilot REs carry row k of the book; every other RE
/// carries the next mapped symbol of that user's bits, subcarrier-major.
std::vector<UserFrame> build_frames(const PilotPlacement& placement, const PilotBook& book,
                                    std::span<const Bits> bits_per_user,
                                    const SystemConfig& config,
                                    const Constellation& constellation);

}  // namespace slidemimo
