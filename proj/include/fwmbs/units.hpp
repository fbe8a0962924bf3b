#pragma once

#include <numbers>
#include <span>
#include <vector>

namespace fwmbs {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Strong scalar types. All internal quantities are SI; the few helpers
// below convert to the customary reporting units at the boundary.

struct Wavelength {
  double meters;
  static Wavelength from_nm(double nm) { return {nm * 1e-9}; }
  double nm() const { return meters * 1e9; }
  friend auto operator<=>(const Wavelength&, const Wavelength&) = default;
};

struct AngularFrequency {
  double rad_per_s;
  friend auto operator<=>(const AngularFrequency&, const AngularFrequency&) = default;
};

/// d^2 beta / d omega^2 in s^2/m. Positive is normal dispersion.
struct Beta2 {
  double s2_per_m;
};

/// Dispersion parameter D in s/m^2; ps/(nm km) is the customary unit.
struct DispersionParameterD {
  double s_per_m2;
  static constexpr double kPsPerNmKm = 1e-6;  // 1 ps/(nm km) in s/m^2
  double ps_per_nm_km() const { return s_per_m2 / kPsPerNmKm; }
};

AngularFrequency to_angular_frequency(Wavelength lambda);
Wavelength to_wavelength(AngularFrequency omega);

// Raw-double conveniences used throughout the numerics.
double omega_from_lambda(double lambda_m);
double lambda_from_omega(double omega_rad_s);

DispersionParameterD dispersion_parameter(Beta2 beta2, Wavelength lambda);

/// Second derivative of a tabulated function on a strictly monotone grid.
/// Three-point central stencil inside, four-point one-sided stencil at the
/// ends (both second-order accurate and exact for quadratics). Non-uniform
/// grids use the Lagrange weights for the local stencil.
std::vector<double> second_derivative_on_grid(std::span<const double> x,
                                              std::span<const double> y);

}  // namespace fwmbs
