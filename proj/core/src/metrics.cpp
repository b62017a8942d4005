#include "slidemimo/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slidemimo {
namespace {

double to_db(double error_power_mean) {
  if (error_power_mean <= kZeroErrorPower) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(error_power_mean);
}

}  // namespace

double ebn0_to_noise_var(double ebn0_db, int constellation_order) {
  if (constellation_order < 4) throw std::invalid_argument("ebn0_to_noise_var: order must be >= 4");
  const double bits = std::log2(static_cast<double>(constellation_order));
  return 1.0 / (bits * std::pow(10.0, ebn0_db / 10.0));
}

std::vector<double> measure_sinr(const Eigen::Ref<const CMatrix>& soft,
                                 const Eigen::Ref<const CMatrix>& truth) {
  if (soft.rows() != truth.rows() || soft.cols() != truth.cols())
    throw std::invalid_argument("measure_sinr: shape mismatch");
  if (soft.cols() == 0) throw std::invalid_argument("measure_sinr: no symbols");
  std::vector<double> out(soft.rows());
  for (Eigen::Index k = 0; k < soft.rows(); ++k)
    out[k] = to_db((soft.row(k) - truth.row(k)).squaredNorm() / static_cast<double>(soft.cols()));
  return out;
}

std::vector<double> measure_sir(const Eigen::Ref<const CMatrix>& soft,
                                const Eigen::Ref<const CMatrix>& truth, double noise_var) {
  if (noise_var != 0.0)
    throw std::invalid_argument("measure_sir: SIR is only defined for noiseless runs");
  return measure_sinr(soft, truth);
}

double measure_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth) {
  if (decided.size() != truth.size()) throw std::invalid_argument("measure_ber: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) errors += (decided[i] & 1u) != (truth[i] & 1u);
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

void LinkTally::merge(const LinkTally& other) {
  if (error_power.empty()) {
    error_power.assign(other.error_power.size(), 0.0);
    symbols.assign(other.symbols.size(), 0);
  }
  if (other.error_power.size() != error_power.size())
    throw std::invalid_argument("LinkTally::merge: user count mismatch");
  for (std::size_t k = 0; k < error_power.size(); ++k) {
    error_power[k] += other.error_power[k];
    symbols[k] += other.symbols[k];
  }
  bit_errors += other.bit_errors;
  bits += other.bits;
  frames += other.frames;
  failed_frames += other.failed_frames;
}

std::vector<double> LinkTally::per_user_sinr_db() const {
  std::vector<double> out(error_power.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = symbols[k] ? to_db(error_power[k] / static_cast<double>(symbols[k]))
                        : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double LinkTally::mean_sinr_db() const {
  double linear = 0.0;
  int users = 0;
  for (std::size_t k = 0; k < error_power.size(); ++k) {
    if (!symbols[k]) continue;
    const double mse = error_power[k] / static_cast<double>(symbols[k]);
    if (mse <= kZeroErrorPower) return std::numeric_limits<double>::infinity();
    linear += 1.0 / mse;
    ++users;
  }
  if (users == 0) return std::numeric_limits<double>::quiet_NaN();
  return 10.0 * std::log10(linear / users);
}

LinkTally score_frame(const DetectionResult& result, std::span<const UserFrame> frames,
                      const Constellation& constellation) {
  const int users = result.users;
  LinkTally tally(users);
  if (result.failed) {
    tally.failed_frames = 1;
    return tally;
  }
  if (static_cast<int>(frames.size()) != users)
    throw std::invalid_argument("score_frame: frame count differs from K");
  const int width = constellation.bits_per_symbol();
  const int m_sub = result.subcarriers;
  const int slots = result.slots;
  for (int k = 0; k < users; ++k) {
    const UserFrame& f = frames[k];
    std::size_t bit_pos = 0;
    double err = 0.0;
    std::uint64_t count = 0;
    std::uint64_t bit_errors = 0;
    for (int m = 0; m < m_sub; ++m) {
      for (int n = 0; n < slots; ++n) {
        if (f.is_pilot(m, n)) continue;
        const Eigen::Index c = static_cast<Eigen::Index>(m) * slots + n;
        err += std::norm(result.soft(k, c) - f.symbols(m, n));
        ++count;
        const unsigned label = result.labels(k, c);
        for (int b = 0; b < width; ++b) {
          const unsigned bit = (label >> (width - 1 - b)) & 1u;
          bit_errors += bit != f.bits[bit_pos++];
        }
      }
    }
    tally.error_power[k] = err;
    tally.symbols[k] = count;
    tally.bit_errors += bit_errors;
    tally.bits += bit_pos;
  }
  tally.frames = 1;
  return tally;
}

}  // namespace slidemimo
