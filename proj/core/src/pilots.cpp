#include "slidemimo/pilots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace slidemimo {

PilotBook zc_pilot_book(int pilot_length, int users, int root) {
  if (pilot_length <= 0 || pilot_length % 2 == 0)
    throw std::invalid_argument("zc_pilot_book: N_p must be odd and positive");
  if (users <= 0 || users > pilot_length)
    throw std::invalid_argument("zc_pilot_book: need 0 < K <= N_p");
  if (root <= 0 || std::gcd(root, pilot_length) != 1)
    throw std::invalid_argument("zc_pilot_book: root " + std::to_string(root) +
                                " is not coprime with N_p = " + std::to_string(pilot_length));

  std::vector<cd> z(pilot_length);
  for (int n = 0; n < pilot_length; ++n) {
    // u*n*(n+1) reduced mod 2*N_p keeps the phase argument small.
    const long long arg = (static_cast<long long>(root) * n * (n + 1)) % (2LL * pilot_length);
    z[n] = std::polar(1.0, -std::numbers::pi * static_cast<double>(arg) / pilot_length);
  }
  PilotBook book{CMatrix(users, pilot_length), root};
  for (int k = 0; k < users; ++k)
    for (int n = 0; n < pilot_length; ++n) book.matrix(k, n) = z[(n + k) % pilot_length];
  return book;
}

std::vector<std::uint8_t> PilotPlacement::mask(int subcarriers, int slots) const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(subcarriers) * slots, 0);
  for (int m : pilot_subcarriers)
    for (int n = 0; n < pilot_slots; ++n) out[static_cast<std::size_t>(m) * slots + n] = 1;
  return out;
}

double pilot_condition_number(int subcarriers, std::span<const int> indices, int channel_length) {
  const int l_taps = channel_length;
  CMatrix f(static_cast<Eigen::Index>(indices.size()), l_taps);
  const double norm = 1.0 / std::sqrt(static_cast<double>(subcarriers));
  for (std::size_t r = 0; r < indices.size(); ++r)
    for (int l = 0; l < l_taps; ++l) {
      const long long phase = (static_cast<long long>(indices[r]) * l) % subcarriers;
      f(static_cast<Eigen::Index>(r), l) =
          std::polar(norm, -2.0 * std::numbers::pi * static_cast<double>(phase) / subcarriers);
    }
  Eigen::JacobiSVD<CMatrix> svd(f);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

std::vector<int> conventional_pilot_indices(int subcarriers, int channel_length,
                                            double max_condition) {
  if (channel_length < 1 || channel_length > subcarriers)
    throw std::invalid_argument("conventional_pilot_indices: need 1 <= L <= M");
  std::vector<std::uint8_t> used(subcarriers, 0);
  std::vector<int> indices;
  indices.reserve(channel_length);
  for (int p = 0; p < channel_length; ++p) {
    int idx = static_cast<int>(std::llround(static_cast<double>(p) * subcarriers / channel_length)) %
              subcarriers;
    while (used[idx]) idx = (idx + 1) % subcarriers;
    used[idx] = 1;
    indices.push_back(idx);
  }
  std::sort(indices.begin(), indices.end());
  const double cond = pilot_condition_number(subcarriers, indices, channel_length);
  if (!(cond <= max_condition))
    throw std::runtime_error("conventional_pilot_indices: pilot DFT submatrix condition number " +
                             std::to_string(cond) + " exceeds " + std::to_string(max_condition));
  return indices;
}

PilotPlacement conventional_placement(const SystemConfig& config, int channel_length) {
  return {PilotScheme::kConventional,
          conventional_pilot_indices(config.subcarriers, channel_length), -1,
          config.pilot_slots};
}

PilotPlacement single_subcarrier_placement(const SystemConfig& config, int reference) {
  const int ref = reference < 0 ? config.subcarriers / 2 : reference;
  if (ref >= config.subcarriers)
    throw std::invalid_argument("single_subcarrier_placement: reference index out of range");
  return {PilotScheme::kSingleSubcarrier, {ref}, ref, config.pilot_slots};
}

int data_re_count(const PilotPlacement& placement, const SystemConfig& config) {
  return config.subcarriers * config.frame_length() - placement.pilot_re_count();
}

std::vector<UserFrame> build_frames(const PilotPlacement& placement, const PilotBook& book,
                                    std::span<const Bits> bits_per_user,
                                    const SystemConfig& config,
                                    const Constellation& constellation) {
  const int m_sub = config.subcarriers;
  const int n_sym = config.frame_length();
  const int users = config.users;
  if (book.users() != users || book.length() != placement.pilot_slots)
    throw std::invalid_argument("build_frames: pilot book does not match K x N_p");
  if (static_cast<int>(bits_per_user.size()) != users)
    throw std::invalid_argument("build_frames: need one bit stream per user");
  const std::size_t needed = static_cast<std::size_t>(data_re_count(placement, config)) *
                             constellation.bits_per_symbol();

  const auto mask = placement.mask(m_sub, n_sym);
  std::vector<UserFrame> frames(users);
  for (int k = 0; k < users; ++k) {
    if (bits_per_user[k].size() != needed)
      throw std::invalid_argument("build_frames: user " + std::to_string(k) + " has " +
                                  std::to_string(bits_per_user[k].size()) + " bits, need " +
                                  std::to_string(needed));
    UserFrame& f = frames[k];
    f.symbols = CMatrix::Zero(m_sub, n_sym);
    f.pilot_mask = mask;
    f.bits = bits_per_user[k];
    const auto data = map_bits(f.bits, constellation);
    std::size_t next = 0;
    for (int m = 0; m < m_sub; ++m)
      for (int n = 0; n < n_sym; ++n)
        f.symbols(m, n) = mask[static_cast<std::size_t>(m) * n_sym + n]
                              ? book.matrix(k, n)
                              : data[next++];
  }
  return frames;
}

}  // namespace slidemimo
