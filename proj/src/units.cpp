#include "fwmbs/units.hpp"

#include <array>
#include <cmath>
#include <string>

#include "fwmbs/errors.hpp"

namespace fwmbs {

namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0)
    throw DomainError(std::string(what) + " must be positive and finite, got " +
                      std::to_string(v));
}

// Fornberg's recursion: weights w such that sum w_j f(x_j) approximates
// f''(z) using the Lagrange interpolant through the stencil points.
template <std::size_t N>
std::array<double, N> second_derivative_weights(double z, const std::array<double, N>& x) {
  constexpr int m = 2;
  double c[N][m + 1] = {};
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < N; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::array<double, N> w{};
  for (std::size_t i = 0; i < N; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace

AngularFrequency to_angular_frequency(Wavelength lambda) {
  require_positive(lambda.meters, "wavelength");
  return {kTwoPi * kSpeedOfLight / lambda.meters};
}

Wavelength to_wavelength(AngularFrequency omega) {
  require_positive(omega.rad_per_s, "angular frequency");
  return {kTwoPi * kSpeedOfLight / omega.rad_per_s};
}

double omega_from_lambda(double lambda_m) { return to_angular_frequency({lambda_m}).rad_per_s; }
double lambda_from_omega(double omega) { return to_wavelength({omega}).meters; }

DispersionParameterD dispersion_parameter(Beta2 beta2, Wavelength lambda) {
  require_positive(lambda.meters, "wavelength");
  if (!std::isfinite(beta2.s2_per_m)) throw DomainError("beta2 must be finite");
  return {-(kTwoPi * kSpeedOfLight / (lambda.meters * lambda.meters)) * beta2.s2_per_m};
}

std::vector<double> second_derivative_on_grid(std::span<const double> x,
                                              std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ShapeError("grid and values differ in length");
  if (n < 5) throw ShapeError("second derivative needs at least 5 grid points");
  const bool increasing = x[1] > x[0];
  for (std::size_t i = 1; i < n; ++i) {
    const bool ok = increasing ? x[i] > x[i - 1] : x[i] < x[i - 1];
    if (!ok || !std::isfinite(x[i])) throw ShapeError("grid is not strictly monotone");
  }

  std::vector<double> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::array<double, 3> s{x[i - 1], x[i], x[i + 1]};
    const auto w = second_derivative_weights(x[i], s);
    out[i] = w[0] * y[i - 1] + w[1] * y[i] + w[2] * y[i + 1];
  }
  {
    const std::array<double, 4> s{x[0], x[1], x[2], x[3]};
    const auto w = second_derivative_weights(x[0], s);
    out[0] = w[0] * y[0] + w[1] * y[1] + w[2] * y[2] + w[3] * y[3];
  }
  {
    const std::array<double, 4> s{x[n - 4], x[n - 3], x[n - 2], x[n - 1]};
    const auto w = second_derivative_weights(x[n - 1], s);
    out[n - 1] = w[0] * y[n - 4] + w[1] * y[n - 3] + w[2] * y[n - 2] + w[3] * y[n - 1];
  }
  return out;
}

}  // namespace fwmbs
