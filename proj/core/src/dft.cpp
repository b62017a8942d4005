#include "slidemimo/dft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace slidemimo {

struct Dft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

namespace {

// FFTW's planner is not thread safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const Dft::Plans> plans_for(int n) {
  static std::map<int, std::shared_ptr<const Dft::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  std::vector<std::complex<double>> a(n), b(n);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  auto plans = std::make_shared<Dft::Plans>();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
  plans->inv = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
  if (!plans->fwd || !plans->inv) throw std::runtime_error("FFTW planning failed");
  cache.emplace(n, plans);
  return plans;
}

void execute(fftw_plan plan, int n, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n)
    throw std::invalid_argument("Dft: buffer size mismatch");
  // FFTW takes a non-const input pointer but does not modify it for
  // out-of-place transforms.
  auto* src = const_cast<fftw_complex*>(
      reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Dft::Dft(int size) : size_(size) {
  if (size <= 0) throw std::invalid_argument("Dft: size must be positive");
  plans_ = plans_for(size);
}

void Dft::forward(std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) const {
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> tmp(in.begin(), in.end());
    execute(plans_->fwd, size_, tmp, out);
    return;
  }
  execute(plans_->fwd, size_, in, out);
}

void Dft::inverse(std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) const {
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> tmp(in.begin(), in.end());
    execute(plans_->inv, size_, tmp, out);
    return;
  }
  execute(plans_->inv, size_, in, out);
}

}  // namespace slidemimo
