#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace slidemimo {

using Rng = std::mt19937_64;

/// Purpose tags keep substreams for different random quantities disjoint.
enum class StreamTag : std::uint64_t {
  kChannel = 1,
  kNoise = 2,
  kBits = 3,
  kTest = 99,
};

/// Derives independent generator substreams from one master seed.
///
/// A substream is a pure function of (master seed, tag, indices), so results
/// do not depend on which worker evaluates which trial or in what order.
class StreamSeeder {
 public:
  explicit StreamSeeder(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t derive(StreamTag tag,
                       std::initializer_list<std::uint64_t> indices) const;

  Rng stream(StreamTag tag, std::initializer_list<std::uint64_t> indices) const {
    return Rng(derive(tag, indices));
  }

 private:
  std::uint64_t master_;
};

/// Circularly-symmetric complex Gaussian sampler CN(0, variance).
class ComplexGaussian {
 public:
  explicit ComplexGaussian(double variance = 1.0);
  std::complex<double> operator()(Rng& rng);

 private:
  double sigma_;
};

}  // namespace slidemimo
