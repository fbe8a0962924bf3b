#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwmbs/execution.hpp"
#include "fwmbs/interp.hpp"
#include "fwmbs/materials.hpp"

namespace fwmbs {

enum class Polarization { TE, TM };

inline constexpr double kDefaultN2 = 2.5e-19;  // m^2/W, silicon nitride

struct WaveguideGeometry {
  double width = 1200e-9;
  double height = 550e-9;
  std::string core = "Si3N4";
  std::string top_clad = "Air";
  std::string substrate = "SiO2";
  double length = 18e-3;

  /// Throws DomainError if a dimension is non-positive or a material is
  /// missing from `db`.
  void validate(const MaterialDb& db) const;
};

// ---------------------------------------------------------------------------
// Three-layer slab

struct SlabLayers {
  double n_film;
  double n_cover;
  double n_substrate;
  double thickness;  // meters
};

/// Fundamental guided mode of an asymmetric slab. The transverse coordinate
/// runs from the substrate (x < 0) through the film [0, thickness] into the
/// cover (x > thickness). For TM the profile is the continuous H component.
struct SlabMode {
  double n_eff;
  double kappa;  // transverse wavenumber in the film, 1/m
  double p;      // decay constant in the cover, 1/m
  double q;      // decay constant in the substrate, 1/m
  double phi;    // film phase so that the film field is cos(kappa x - phi)
  double thickness;

  double field(double x) const;
  /// Closed-form integrals of field^2 and field^4 over the whole line.
  double integral_power2() const;
  double integral_power4() const;
};

SlabMode solve_slab(const SlabLayers& layers, double lambda_m, Polarization pol);
double slab_effective_index(const SlabLayers& layers, double lambda_m, Polarization pol);

// ---------------------------------------------------------------------------
// Effective-index method for the rectangular ridge

struct ModeSolution {
  double n_eff;
  SlabMode vertical;    // across the height
  SlabMode horizontal;  // across the width, film index = vertical.n_eff
};

ModeSolution solve_mode(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                        Polarization pol = Polarization::TE);
double effective_index(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                       Polarization pol = Polarization::TE);

/// (integral |E|^2)^2 / integral |E|^4 of the separable EIM profile, m^2.
double effective_area(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                      Polarization pol = Polarization::TE);
double effective_area(const ModeSolution& mode);

/// Quadrature of a separable profile X(x) Y(y) with composite Simpson on
/// `samples` points per axis (odd count enforced).
double effective_area_separable(const std::function<double(double)>& fx, double x0, double x1,
                                const std::function<double(double)>& fy, double y0, double y1,
                                int samples = 4097);

double nonlinear_coefficient(double a_eff_m2, double n2_m2_per_w, double lambda_m);

// ---------------------------------------------------------------------------
// Tabulated dispersion

class DispersionProfile {
 public:
  DispersionProfile() = default;
  /// omega strictly increasing and beta strictly increasing, >= 5 points.
  /// beta2 is derived by finite differences. `gamma` may be empty, in which
  /// case it is filled with zeros.
  DispersionProfile(std::vector<double> omega, std::vector<double> beta,
                    std::vector<double> gamma = {});

  std::span<const double> omega() const { return omega_; }
  std::span<const double> beta() const { return beta_; }
  std::span<const double> beta2() const { return beta2_; }
  std::span<const double> gamma() const { return gamma_; }
  std::size_t size() const { return omega_.size(); }

  double omega_min() const { return omega_.front(); }
  double omega_max() const { return omega_.back(); }
  bool covers(double omega) const { return omega >= omega_min() && omega <= omega_max(); }

  double beta_at(double omega) const { return beta_table_(omega); }
  double beta1_at(double omega) const { return beta_table_.derivative(omega); }
  double beta2_at(double omega) const { return beta2_table_(omega); }
  double gamma_at(double omega) const { return gamma_table_(omega); }
  double n_eff_at(double omega) const;
  /// D in ps/(nm km) at the given wavelength.
  double dispersion_ps_nm_km(double lambda_m) const;

  std::optional<WaveguideGeometry> geometry;
  Polarization polarization = Polarization::TE;
  double n2 = kDefaultN2;

 private:
  std::vector<double> omega_, beta_, beta2_, gamma_;
  CubicTable beta_table_, beta2_table_, gamma_table_;
};

struct TableRequest {
  double lambda_min;  // meters
  double lambda_max;
  int n_points = 256;
  Polarization polarization = Polarization::TE;
  double n2 = kDefaultN2;
};

/// beta(omega) = n_eff omega / c on a uniform omega grid spanning the
/// wavelength range, with beta2 and gamma at every point.
DispersionProfile propagation_constant_table(const MaterialDb& db, const WaveguideGeometry& g,
                                             const TableRequest& req,
                                             Execution exec = Execution::Parallel);

/// Zero crossings of beta2, ascending in wavelength; empty if none.
std::vector<double> zero_dispersion_wavelengths(const DispersionProfile& p);

}  // namespace fwmbs
