#include "slidemimo/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slidemimo/dft.hpp"

namespace slidemimo {

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("SystemConfig: " + what);
  };
  if (subcarriers <= 0) fail("M must be positive");
  if (cp_length < 0) fail("M_CP must be nonnegative");
  if (users <= 0) fail("K must be positive");
  if (antennas <= 0) fail("Q must be positive");
  if (pilot_slots < users) fail("N_p must be at least K");
  if (data_slots < 0) fail("N_d must be nonnegative");
  if (!(subcarrier_spacing > 0.0)) fail("delta_f must be positive");
  if (!(noise_var >= 0.0)) fail("noise_var must be nonnegative");
  if (depth < 0) fail("depth must be nonnegative");
  int order = constellation_order;
  while (order > 1 && order % 4 == 0) order /= 4;
  if (constellation_order < 4 || order != 1) fail("constellation order must be a power of 4");
}

void SystemConfig::validate_channel_length(int channel_length) const {
  if (channel_length < 1) throw std::invalid_argument("channel length must be >= 1");
  if (channel_length - 1 > cp_length)
    throw std::invalid_argument("channel length " + std::to_string(channel_length) +
                                " exceeds CP length " + std::to_string(cp_length) + " + 1");
  if (channel_length > subcarriers)
    throw std::invalid_argument("channel length exceeds subcarrier count");
}

Constellation::Constellation(int order) {
  int bits = 0;
  while ((1 << bits) < order) ++bits;
  if (order < 4 || (1 << bits) != order || bits % 2 != 0)
    throw std::invalid_argument("Constellation: order must be a power of 4, got " +
                                std::to_string(order));
  bits_per_symbol_ = bits;
  bits_per_axis_ = bits / 2;
  const unsigned levels = 1u << bits_per_axis_;
  scale_ = std::sqrt(2.0 * (order - 1) / 3.0);

  // Recursive Gray construction: the first bit picks the sign of the inner
  // level, each further bit folds the amplitude outward.
  std::vector<double> level_of_label(levels);
  for (unsigned label = 0; label < levels; ++label) {
    auto bit = [&](int j) { return (label >> (bits_per_axis_ - 1 - j)) & 1u; };
    double v = 1.0 - 2.0 * bit(0);
    for (int j = 1; j < bits_per_axis_; ++j)
      v = (1.0 - 2.0 * bit(j)) * (static_cast<double>(1u << j) - v);
    level_of_label[label] = v;
  }

  axis_levels_.resize(levels);
  axis_labels_.resize(levels);
  for (unsigned label = 0; label < levels; ++label) {
    const auto j = static_cast<unsigned>(std::lround((level_of_label[label] + (levels - 1)) / 2.0));
    axis_levels_[j] = level_of_label[label];
    axis_labels_[j] = label;
  }

  points_.resize(order);
  for (unsigned label = 0; label < static_cast<unsigned>(order); ++label) {
    const unsigned li = label >> bits_per_axis_;
    const unsigned lq = label & (levels - 1);
    points_[label] = cd(level_of_label[li], level_of_label[lq]) / scale_;
  }
}

unsigned Constellation::slice_axis(double x) const {
  const int levels = static_cast<int>(axis_levels_.size());
  double pos = std::floor((x + (levels - 1)) / 2.0);
  int j = 0;
  if (pos >= levels - 2) {
    j = levels - 2;
  } else if (pos > 0) {
    j = static_cast<int>(pos);
  }
  const double d0 = std::abs(x - axis_levels_[j]);
  const double d1 = std::abs(x - axis_levels_[j + 1]);
  if (d0 < d1) return axis_labels_[j];
  if (d1 < d0) return axis_labels_[j + 1];
  return std::min(axis_labels_[j], axis_labels_[j + 1]);
}

unsigned Constellation::nearest_label(cd soft) const {
  const unsigned li = slice_axis(soft.real() * scale_);
  const unsigned lq = slice_axis(soft.imag() * scale_);
  return (li << bits_per_axis_) | lq;
}

std::vector<cd> map_bits(std::span<const std::uint8_t> bits,
                         const Constellation& constellation) {
  const int width = constellation.bits_per_symbol();
  if (bits.size() % width != 0)
    throw std::invalid_argument("map_bits: bit count " + std::to_string(bits.size()) +
                                " not divisible by symbol width " + std::to_string(width));
  std::vector<cd> out(bits.size() / width);
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned label = 0;
    for (int b = 0; b < width; ++b) label = (label << 1) | (bits[s * width + b] & 1u);
    out[s] = constellation.point(label);
  }
  return out;
}

HardDecision hard_decision(cd soft, const Constellation& constellation) {
  const unsigned label = constellation.nearest_label(soft);
  return {constellation.point(label), label};
}

void append_label_bits(unsigned label, int bits_per_symbol, Bits& out) {
  for (int b = bits_per_symbol - 1; b >= 0; --b)
    out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
}

Bits random_bits(std::size_t count, Rng& rng) {
  Bits out(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return out;
}

SpaceTimeGrid::SpaceTimeGrid(int subcarriers, int antennas, int slots)
    : subcarriers_(subcarriers),
      slots_(slots),
      data_(CMatrix::Zero(antennas, static_cast<Eigen::Index>(subcarriers) * slots)) {}

std::vector<cd> ofdm_modulate(const CMatrix& grid, int cp_length) {
  const int m_sub = static_cast<int>(grid.rows());
  const int n_sym = static_cast<int>(grid.cols());
  const int block = m_sub + cp_length;
  const Dft dft(m_sub);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m_sub));

  std::vector<cd> out(static_cast<std::size_t>(n_sym) * block);
  std::vector<cd> body(m_sub);
  for (int n = 0; n < n_sym; ++n) {
    dft.inverse({grid.col(n).data(), static_cast<std::size_t>(m_sub)}, body);
    cd* dst = out.data() + static_cast<std::size_t>(n) * block;
    for (int t = 0; t < m_sub; ++t) dst[cp_length + t] = body[t] * norm;
    for (int t = 0; t < cp_length; ++t) dst[t] = dst[m_sub + t];
  }
  return out;
}

std::vector<cd> ofdm_modulate(const UserFrame& frame, const SystemConfig& config) {
  if (frame.symbols.rows() != config.subcarriers ||
      frame.symbols.cols() != config.frame_length())
    throw std::invalid_argument("ofdm_modulate: frame is not M x N");
  return ofdm_modulate(frame.symbols, config.cp_length);
}

CMatrix ofdm_demodulate(std::span<const cd> samples, const SystemConfig& config) {
  const int m_sub = config.subcarriers;
  const int n_sym = config.frame_length();
  const int block = m_sub + config.cp_length;
  if (samples.size() != static_cast<std::size_t>(n_sym) * block)
    throw std::invalid_argument("ofdm_demodulate: expected " +
                                std::to_string(static_cast<std::size_t>(n_sym) * block) +
                                " samples, got " + std::to_string(samples.size()));
  const Dft dft(m_sub);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m_sub));
  CMatrix grid(m_sub, n_sym);
  for (int n = 0; n < n_sym; ++n) {
    auto body = samples.subspan(static_cast<std::size_t>(n) * block + config.cp_length, m_sub);
    dft.forward(body, {grid.col(n).data(), static_cast<std::size_t>(m_sub)});
  }
  grid *= norm;
  return grid;
}

SpaceTimeGrid assemble_space_time(std::span<const CMatrix> per_antenna) {
  if (per_antenna.empty()) throw std::invalid_argument("assemble_space_time: no antennas");
  const int m_sub = static_cast<int>(per_antenna[0].rows());
  const int n_sym = static_cast<int>(per_antenna[0].cols());
  SpaceTimeGrid grid(m_sub, static_cast<int>(per_antenna.size()), n_sym);
  for (std::size_t q = 0; q < per_antenna.size(); ++q) {
    const CMatrix& g = per_antenna[q];
    if (g.rows() != m_sub || g.cols() != n_sym)
      throw std::invalid_argument("assemble_space_time: inconsistent grid dimensions");
    for (int m = 0; m < m_sub; ++m)
      for (int n = 0; n < n_sym; ++n) grid.at(m, static_cast<int>(q), n) = g(m, n);
  }
  return grid;
}

}  // namespace slidemimo
