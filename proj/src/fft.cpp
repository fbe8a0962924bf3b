#include "fwmbs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "fwmbs/errors.hpp"

namespace fwmbs {

namespace detail {
void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (!p) throw std::bad_alloc();
  return p;
}
void fft_free(void* p) noexcept { fftw_free(p); }
}  // namespace detail

struct Fft::Plans {
  fftw_plan forward = nullptr;   // FFTW_FORWARD, exp(-i...)
  fftw_plan backward = nullptr;  // FFTW_BACKWARD, exp(+i...)
  ~Plans() {
    // The planner is not thread-safe; destruction happens at exit from the
    // static cache, after all users are gone.
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0) throw DomainError("FFT size must be a power of two");
  static std::map<std::size_t, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[n];
  if (!slot) {
    ComplexVector scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    auto plans = std::make_shared<Plans>();
    // FFTW_ESTIMATE never times candidate algorithms, so the plan (and the
    // floating-point result) is the same on every run.
    plans->forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plans->backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans->forward || !plans->backward) throw NumericalError("FFTW planning failed");
    slot = std::move(plans);
  }
  plans_ = slot;
}

namespace {
fftw_complex* checked(std::span<Complex> data, std::size_t n) {
  if (data.size() != n) throw ShapeError("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  if (fftw_alignment_of(reinterpret_cast<double*>(p)) != 0)
    throw ShapeError("FFT buffer is not FFTW-aligned; use ComplexVector");
  return p;
}
}  // namespace

void Fft::to_spectrum(std::span<Complex> data) const {
  auto* buf = checked(data, n_);
  fftw_execute_dft(plans_->backward, buf, buf);
  const double inv = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= inv;
}

void Fft::to_time(std::span<Complex> data) const {
  auto* buf = checked(data, n_);
  fftw_execute_dft(plans_->forward, buf, buf);
}

}  // namespace fwmbs
