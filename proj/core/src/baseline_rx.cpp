#include "slidemimo/baseline_rx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slidemimo/dft.hpp"

namespace slidemimo {

void DetectionResult::decide(const Constellation& constellation) {
  for (Eigen::Index c = 0; c < soft.cols(); ++c)
    for (Eigen::Index k = 0; k < soft.rows(); ++k) {
      const unsigned label = constellation.nearest_label(soft(k, c));
      labels(k, c) = label;
      hard(k, c) = constellation.point(label);
    }
}

ChannelEstimate ls_estimate(const Eigen::Ref<const CMatrix>& pilot_rx, const PilotBook& book,
                            double noise_var) {
  if (pilot_rx.cols() != book.length())
    throw std::invalid_argument("ls_estimate: pilot block width differs from N_p");
  const double np = book.length();
  const double q = static_cast<double>(pilot_rx.rows());
  ChannelEstimate est;
  est.lambda_hat = pilot_rx * book.matrix.adjoint() / np;
  est.noise_mitigation = (q * noise_var / (np * np)) * (book.matrix * book.matrix.adjoint());
  est.source = EstimateSource::kPilot;
  return est;
}

CirInterpolator::CirInterpolator(int subcarriers, std::vector<int> pilot_indices,
                                 int channel_length)
    : subcarriers_(subcarriers), pilot_indices_(std::move(pilot_indices)) {
  const int l_taps = channel_length;
  if (static_cast<int>(pilot_indices_.size()) != l_taps)
    throw std::invalid_argument("CirInterpolator: need exactly L pilot subcarriers");
  if (l_taps < 1 || l_taps > subcarriers)
    throw std::invalid_argument("CirInterpolator: need 1 <= L <= M");

  auto kernel = [&](long long m, long long l) {
    const long long phase = (m * l) % subcarriers;
    return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(phase) / subcarriers);
  };
  CMatrix g(l_taps, l_taps);
  for (int i = 0; i < l_taps; ++i)
    for (int l = 0; l < l_taps; ++l) g(i, l) = kernel(pilot_indices_[i], l);
  lu_.compute(g);
  if (!(lu_.rcond() > 1e-12))
    throw std::runtime_error("CirInterpolator: pilot DFT submatrix is singular");

  const CMatrix g_inv = lu_.inverse();
  noise_gain_.resize(subcarriers);
  CVector row(l_taps);
  for (int m = 0; m < subcarriers; ++m) {
    for (int l = 0; l < l_taps; ++l) row(l) = kernel(m, l);
    noise_gain_[m] = (row.transpose() * g_inv).squaredNorm();
  }
}

CMatrix CirInterpolator::solve_cir(const CMatrix& cfr_at_pilots) const {
  return lu_.solve(cfr_at_pilots);
}

std::vector<ChannelEstimate> CirInterpolator::reconstruct(
    std::span<const ChannelEstimate> at_pilots) const {
  const int l_taps = channel_length();
  if (static_cast<int>(at_pilots.size()) != l_taps)
    throw std::invalid_argument("reconstruct_cfr: need one estimate per pilot subcarrier");
  const auto q = at_pilots[0].lambda_hat.rows();
  const auto k = at_pilots[0].lambda_hat.cols();
  const Eigen::Index cols = q * k;

  CMatrix stacked(l_taps, cols);
  for (int i = 0; i < l_taps; ++i)
    stacked.row(i) = Eigen::Map<const CVector>(at_pilots[i].lambda_hat.data(), cols).transpose();
  const CMatrix cir = solve_cir(stacked);

  std::vector<ChannelEstimate> out(subcarriers_);
  for (int m = 0; m < subcarriers_; ++m) {
    out[m].lambda_hat.resize(q, k);
    out[m].noise_mitigation = noise_gain_[m] * at_pilots[0].noise_mitigation;
    out[m].source = EstimateSource::kInterpolated;
  }
  const Dft dft(subcarriers_);
  std::vector<cd> padded(subcarriers_), spectrum(subcarriers_);
  for (Eigen::Index c = 0; c < cols; ++c) {
    std::fill(padded.begin(), padded.end(), cd{});
    for (int l = 0; l < l_taps; ++l) padded[l] = cir(l, c);
    dft.forward(padded, spectrum);
    for (int m = 0; m < subcarriers_; ++m) out[m].lambda_hat.data()[c] = spectrum[m];
  }
  return out;
}

std::vector<ChannelEstimate> reconstruct_cfr(std::span<const ChannelEstimate> at_pilots,
                                             std::span<const int> pilot_indices,
                                             int subcarriers, int channel_length) {
  CirInterpolator interp(subcarriers, {pilot_indices.begin(), pilot_indices.end()},
                         channel_length);
  return interp.reconstruct(at_pilots);
}

CMatrix mrc_combine(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& estimate,
                    double gamma_floor) {
  const CMatrix& lam = estimate.lambda_hat;
  const double floor = gamma_floor * static_cast<double>(lam.rows());
  CMatrix out = lam.adjoint() * rx;
  for (Eigen::Index k = 0; k < lam.cols(); ++k) {
    const double gamma = std::max(
        lam.col(k).squaredNorm() - estimate.noise_mitigation(k, k).real(), floor);
    out.row(k) /= gamma;
  }
  return out;
}

CMatrix mmse_filter(const ChannelEstimate& estimate, double noise_var) {
  const CMatrix& lam = estimate.lambda_hat;
  const auto users = lam.cols();
  CMatrix a = lam.adjoint() * lam - estimate.noise_mitigation;
  a = (0.5 * (a + a.adjoint())).eval();
  a.diagonal().array() += noise_var;

  constexpr double kMinRcond = 1e-13;
  Eigen::PartialPivLU<CMatrix> lu(a);
  if (!(lu.rcond() > kMinRcond)) {
    const double ridge = 1e-12 * std::abs(a.trace().real()) / static_cast<double>(users);
    a.diagonal().array() += ridge;
    lu.compute(a);
    if (!(lu.rcond() > kMinRcond))
      throw std::runtime_error("mmse_filter: Gram matrix is singular after regularization");
  }
  return lu.solve(lam.adjoint());
}

CMatrix mmse_combine(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& estimate,
                     double noise_var) {
  return mmse_filter(estimate, noise_var) * rx;
}

DetectionResult run_conventional(const SpaceTimeGrid& grid, const PilotPlacement& placement,
                                 const PilotBook& book, const CirInterpolator& interpolator,
                                 double noise_var, Combiner combiner,
                                 const Constellation& constellation) {
  if (placement.scheme != PilotScheme::kConventional)
    throw std::invalid_argument("run_conventional: needs the conventional pilot placement");
  if (placement.pilot_subcarriers != interpolator.pilot_indices())
    throw std::invalid_argument("run_conventional: interpolator built for other pilots");

  const int m_sub = grid.subcarriers();
  const int slots = grid.slots();
  const int np = placement.pilot_slots;

  std::vector<ChannelEstimate> at_pilots;
  at_pilots.reserve(placement.pilot_subcarriers.size());
  for (int m : placement.pilot_subcarriers)
    at_pilots.push_back(ls_estimate(grid.subcarrier(m).leftCols(np), book, noise_var));
  std::vector<ChannelEstimate> full = interpolator.reconstruct(at_pilots);

  DetectionResult result(m_sub, book.users(), slots);
  for (int m = 0; m < m_sub; ++m) {
    if (combiner == Combiner::kMmse) {
      result.soft_at(m).noalias() = mmse_filter(full[m], noise_var) * grid.subcarrier(m);
    } else {
      result.soft_at(m) = mrc_combine(grid.subcarrier(m), full[m]);
    }
    result.estimates[m] = std::move(full[m]);
  }
  result.decide(constellation);
  return result;
}

}  // namespace slidemimo
