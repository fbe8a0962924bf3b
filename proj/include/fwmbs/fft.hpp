#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace fwmbs {

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning FFTW-aligned storage, so every buffer matches the
/// alignment the cached plans were created for.
template <class T>
struct FftAllocator {
  using value_type = T;
  FftAllocator() = default;
  template <class U>
  FftAllocator(const FftAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(detail::fft_alloc(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }
  template <class U>
  bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex, FftAllocator<Complex>>;

/// In-place transforms for one size. Plans come from a process-wide cache;
/// executing them is thread-safe and single-threaded, so results do not
/// depend on how many runs execute concurrently.
///
/// Conventions (envelope a_j, spectrum A_k, k = frequency bin):
///   to_time:     a_j = sum_k A_k exp(-2 pi i j k / N)
///   to_spectrum: A_k = (1/N) sum_j a_j exp(+2 pi i j k / N)
/// so |A_k|^2 is the power in bin k and sum_k |A_k|^2 = mean_j |a_j|^2.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void to_spectrum(std::span<Complex> data) const;
  void to_time(std::span<Complex> data) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace fwmbs
