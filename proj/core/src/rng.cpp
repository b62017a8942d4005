#include "slidemimo/rng.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>

namespace slidemimo {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t StreamSeeder::derive(
    StreamTag tag, std::initializer_list<std::uint64_t> indices) const {
  std::uint64_t h = splitmix64(master_ ^ 0x5EED5EED5EED5EEDULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  for (std::uint64_t idx : indices) h = splitmix64(h ^ (idx + 0x632BE59BD9B4E019ULL));
  return h;
}

ComplexGaussian::ComplexGaussian(double variance)
    : sigma_(std::sqrt(variance / 2.0)) {}

std::complex<double> ComplexGaussian::operator()(Rng& rng) {
  // Boost's ziggurat sampler: fast and identical across standard libraries.
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {sigma_ * re, sigma_ * im};
}

}  // namespace slidemimo
