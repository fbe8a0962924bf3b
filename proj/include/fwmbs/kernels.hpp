#pragma once

#include <span>

#include "fwmbs/execution.hpp"
#include "fwmbs/fft.hpp"

// Data-parallel inner loops of the split-step engine. Each kernel has a
// serial reference path and an OpenMP path selected by Execution; the two
// are bit-identical (element-wise arithmetic, fixed-chunk reductions).

namespace fwmbs::kernels {

/// data[k] *= factor[k]
void multiply(std::span<Complex> data, std::span<const Complex> factor, Execution exec);

/// a[j] *= exp(i gamma_h |a[j]|^2). Returns max |a[j]|^2 before the update.
double kerr_step(std::span<Complex> a, double gamma_h, Execution exec);

/// factor[k] = amplitude * exp(i phase[k] * length)
void build_propagator(std::span<Complex> factor, std::span<const double> phase_per_m,
                      double length, double amplitude, Execution exec);

/// sum |v|^2, accumulated over fixed 4096-element chunks in index order.
double sum_power(std::span<const Complex> v, Execution exec);

/// sum |v[k]|^2 over k with mask[k] != 0, same chunking as sum_power.
double sum_power_masked(std::span<const Complex> v, std::span<const unsigned char> mask,
                        Execution exec);

double max_power(std::span<const Complex> v, Execution exec);

}  // namespace fwmbs::kernels
