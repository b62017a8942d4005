#include "slidemimo/sliding_rx.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slidemimo/baseline_rx.hpp"

namespace slidemimo {

cd alpha_exact(const SampledPdp& pdp, long long offset, int subcarriers) {
  const int dm = wrap_index(offset, subcarriers);
  cd acc{};
  for (int l = 0; l < pdp.length(); ++l) {
    const long long phase = (static_cast<long long>(dm) * l) % subcarriers;
    acc += pdp.rho[l] *
           std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(phase) / subcarriers);
  }
  return acc;
}

double alpha_approx(double subcarrier_spacing, long long offset, double coherence_bw) {
  if (std::isinf(coherence_bw)) return 1.0;
  const double ratio = subcarrier_spacing * static_cast<double>(offset) / coherence_bw;
  const double arg = 1.0 - ratio * ratio;
  if (arg < 0.0)
    throw std::domain_error("alpha_approx: offset " + std::to_string(offset) +
                            " lies beyond the coherence bandwidth");
  return std::sqrt(arg);
}

AlphaTable::AlphaTable(std::span<const SampledPdp> pdp_per_user, int subcarriers,
                       AlphaMode mode, double subcarrier_spacing)
    : subcarriers_(subcarriers), mode_(mode) {
  const double sample_rate = subcarriers * subcarrier_spacing;
  for (const auto& pdp : pdp_per_user) {
    std::vector<cd> row(subcarriers);
    const double fc = coherence_bandwidth(pdp, sample_rate);
    for (int dm = 0; dm < subcarriers; ++dm) {
      if (mode == AlphaMode::kExactPdp) {
        row[dm] = dm == 0 ? cd(1.0, 0.0) : alpha_exact(pdp, dm, subcarriers);
      } else {
        const long long shortest = dm <= subcarriers / 2 ? dm : dm - subcarriers;
        try {
          row[dm] = alpha_approx(subcarrier_spacing, shortest, fc);
        } catch (const std::domain_error&) {
          row[dm] = 0.0;
        }
      }
    }
    table_.push_back(std::move(row));
  }
}

void apply_inverse_alpha(CMatrix& rows, const AlphaTable& alpha, long long offset,
                         double alpha_min) {
  for (Eigen::Index k = 0; k < rows.rows(); ++k) {
    const cd a = alpha(static_cast<int>(k), offset);
    if (std::abs(a) < alpha_min)
      throw AlphaGuardError("|alpha| = " + std::to_string(std::abs(a)) + " at offset " +
                            std::to_string(offset) + " is below the guard " +
                            std::to_string(alpha_min));
    if (a != cd(1.0, 0.0)) rows.row(k) *= 1.0 / a;
  }
}

CMatrix cross_combine_mrc(const Eigen::Ref<const CMatrix>& rx, const ChannelEstimate& source,
                          const AlphaTable& alpha, long long offset, double alpha_min) {
  CMatrix out = mrc_combine(rx, source);
  apply_inverse_alpha(out, alpha, offset, alpha_min);
  return out;
}

CMatrix sliding_mmse_step(const Eigen::Ref<const CMatrix>& rx,
                          const std::optional<ChannelEstimate>& source,
                          const AlphaTable& alpha, long long offset, double noise_var,
                          double alpha_min) {
  if (!source) throw std::invalid_argument("sliding_mmse_step: no estimate at the source subcarrier");
  CMatrix out = mmse_filter(*source, noise_var) * rx;
  apply_inverse_alpha(out, alpha, offset, alpha_min);
  return out;
}

std::optional<ChannelEstimate> virtual_pilot_update(const Eigen::Ref<const CMatrix>& rx,
                                                    const Eigen::Ref<const CMatrix>& decided,
                                                    double noise_var, double rank_tol) {
  const CMatrix gram = decided * decided.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();  // ascending, squared singular values
  const double largest = ev(ev.size() - 1);
  if (!(largest > 0.0) || !(ev(0) >= rank_tol * rank_tol * largest)) return std::nullopt;

  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;
  CMatrix gram_inv = llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));
  gram_inv = (0.5 * (gram_inv + gram_inv.adjoint())).eval();

  ChannelEstimate est;
  est.lambda_hat = (rx * decided.adjoint()) * gram_inv;
  est.noise_mitigation = (static_cast<double>(rx.rows()) * noise_var) * gram_inv;
  est.source = EstimateSource::kVirtualPilot;
  return est;
}

namespace {

struct StoredEstimate {
  ChannelEstimate estimate;
  CMatrix filter;  // cached MMSE combiner
};

struct PassOutput {
  CMatrix soft;
  std::vector<std::optional<StoredEstimate>> estimates;
};

PassOutput run_pass(const SpaceTimeGrid& grid, int reference, const StoredEstimate& seed,
                    const AlphaTable& alpha, const SystemConfig& config,
                    const Constellation& constellation, const SlidingOptions& options,
                    int direction) {
  const int m_sub = grid.subcarriers();
  const int slots = grid.slots();
  const int users = static_cast<int>(seed.estimate.lambda_hat.cols());
  const int depth = config.depth;

  PassOutput out{CMatrix::Zero(users, static_cast<Eigen::Index>(m_sub) * slots),
                 std::vector<std::optional<StoredEstimate>>(m_sub)};
  out.estimates[reference] = seed;
  out.soft.middleCols(reference * slots, slots).noalias() =
      seed.filter * grid.subcarrier(reference);

  int anchor = reference;
  CMatrix acc(users, slots);
  CMatrix term(users, slots);
  CMatrix decided(users, slots);
  for (int step = 1; step < m_sub; ++step) {
    const int m = wrap_index(reference + static_cast<long long>(direction) * step, m_sub);
    const auto rx = grid.subcarrier(m);

    acc.setZero();
    int used = 0;
    for (int dm = 1; dm <= depth; ++dm) {
      const int src = wrap_index(m - static_cast<long long>(direction) * dm, m_sub);
      if (!out.estimates[src]) continue;
      term.noalias() = out.estimates[src]->filter * rx;
      apply_inverse_alpha(term, alpha, static_cast<long long>(direction) * dm, options.alpha_min);
      acc += term;
      ++used;
    }
    if (used == 0) {
      const long long offset =
          static_cast<long long>(direction) *
          wrap_index(static_cast<long long>(direction) * (m - anchor), m_sub);
      acc.noalias() = out.estimates[anchor]->filter * rx;
      apply_inverse_alpha(acc, alpha, offset, options.alpha_min);
    } else {
      acc /= static_cast<double>(used);
    }
    out.soft.middleCols(static_cast<Eigen::Index>(m) * slots, slots) = acc;

    for (int n = 0; n < slots; ++n)
      for (int k = 0; k < users; ++k)
        decided(k, n) = constellation.point(constellation.nearest_label(acc(k, n)));

    auto updated = virtual_pilot_update(rx, decided, config.noise_var, options.rank_tol);
    if (!updated) continue;
    try {
      CMatrix filter = mmse_filter(*updated, config.noise_var);
      out.estimates[m] = StoredEstimate{std::move(*updated), std::move(filter)};
      anchor = m;
    } catch (const std::runtime_error&) {
      // Singular Gram matrix: treat like a rank-deficient update.
    }
  }
  return out;
}

}  // namespace

DetectionResult run_sliding(const SpaceTimeGrid& grid, const PilotPlacement& placement,
                            const PilotBook& book, const AlphaTable& alpha,
                            const SystemConfig& config, const SlidingOptions& options) {
  if (placement.scheme != PilotScheme::kSingleSubcarrier || placement.reference_index < 0)
    throw std::invalid_argument("run_sliding: needs a single-subcarrier pilot placement");
  if (alpha.subcarriers() != grid.subcarriers() || alpha.users() != book.users())
    throw std::invalid_argument("run_sliding: alpha table does not match the grid");

  const int m_sub = grid.subcarriers();
  const int slots = grid.slots();
  const int users = book.users();
  const int reference = placement.reference_index;
  const Constellation constellation(config.constellation_order);

  StoredEstimate seed;
  seed.estimate =
      ls_estimate(grid.subcarrier(reference).leftCols(placement.pilot_slots), book, config.noise_var);
  seed.filter = mmse_filter(seed.estimate, config.noise_var);

  DetectionResult result(m_sub, users, slots);
  try {
    PassOutput up = run_pass(grid, reference, seed, alpha, config, constellation, options, +1);
    if (config.depth == 0) {
      result.soft = std::move(up.soft);
    } else {
      PassOutput down = run_pass(grid, reference, seed, alpha, config, constellation, options, -1);
      result.soft = 0.5 * (up.soft + down.soft);
    }
    for (int m = 0; m < m_sub; ++m)
      if (up.estimates[m]) result.estimates[m] = std::move(up.estimates[m]->estimate);
  } catch (const AlphaGuardError&) {
    result.failed = true;
    return result;
  }
  result.decide(constellation);
  return result;
}

}  // namespace slidemimo
