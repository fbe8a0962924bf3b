#include "fwmbs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fwmbs/errors.hpp"

namespace fwmbs::kernels {

namespace {

constexpr std::ptrdiff_t kChunk = 4096;

template <class Body>
void for_each_index(std::ptrdiff_t n, Execution exec, Body&& body) {
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
}

template <class Term>
double chunked_sum(std::ptrdiff_t n, Execution exec, Term&& term) {
  const std::ptrdiff_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  for_each_index(chunks, exec, [&](std::ptrdiff_t c) {
    const std::ptrdiff_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void multiply(std::span<Complex> data, std::span<const Complex> factor, Execution exec) {
  if (data.size() != factor.size()) throw ShapeError("multiply: size mismatch");
  for_each_index(static_cast<std::ptrdiff_t>(data.size()), exec,
                 [&](std::ptrdiff_t i) { data[i] *= factor[i]; });
}

double kerr_step(std::span<Complex> a, double gamma_h, Execution exec) {
  const double peak = max_power(a, exec);
  for_each_index(static_cast<std::ptrdiff_t>(a.size()), exec, [&](std::ptrdiff_t i) {
    const double phase = gamma_h * std::norm(a[i]);
    a[i] *= Complex(std::cos(phase), std::sin(phase));
  });
  return peak;
}

void build_propagator(std::span<Complex> factor, std::span<const double> phase_per_m,
                      double length, double amplitude, Execution exec) {
  if (factor.size() != phase_per_m.size()) throw ShapeError("propagator: size mismatch");
  for_each_index(static_cast<std::ptrdiff_t>(factor.size()), exec, [&](std::ptrdiff_t i) {
    const double ph = phase_per_m[i] * length;
    factor[i] = amplitude * Complex(std::cos(ph), std::sin(ph));
  });
}

double sum_power(std::span<const Complex> v, Execution exec) {
  return chunked_sum(static_cast<std::ptrdiff_t>(v.size()), exec,
                     [&](std::ptrdiff_t i) { return std::norm(v[i]); });
}

double sum_power_masked(std::span<const Complex> v, std::span<const unsigned char> mask,
                        Execution exec) {
  if (v.size() != mask.size()) throw ShapeError("masked sum: size mismatch");
  return chunked_sum(static_cast<std::ptrdiff_t>(v.size()), exec,
                     [&](std::ptrdiff_t i) { return mask[i] ? std::norm(v[i]) : 0.0; });
}

double max_power(std::span<const Complex> v, Execution exec) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
  double m = 0.0;
  if (exec == Execution::Parallel) {
#pragma omp parallel for reduction(max : m) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::norm(v[i]));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::norm(v[i]));
  }
  return m;
}

}  // namespace fwmbs::kernels
