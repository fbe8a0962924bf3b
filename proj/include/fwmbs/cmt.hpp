#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fwmbs/execution.hpp"
#include "fwmbs/modesolver.hpp"

namespace fwmbs {

/// Which Bragg-scattering idler: plus is omega_2 + (omega_s - omega_1),
/// minus is omega_2 - (omega_s - omega_1).
enum class Branch { Plus, Minus };

std::string to_string(Branch b);

struct IdlerPair {
  double plus;
  double minus;
};

/// omega_i = omega_2 +/- (omega_s - omega_1). Throws DomainError if an input
/// or a resulting idler is not positive.
IdlerPair idler_frequencies(double omega_p1, double omega_p2, double omega_s);
/// Two-pump narrowband rule omega_i = omega_s +/- (omega_2 - omega_1).
IdlerPair narrowband_idler(double omega_s, double omega_p1, double omega_p2);
double idler_frequency(double omega_p1, double omega_p2, double omega_s, Branch b);

/// Linear mismatch from the tabulated beta (cubic interpolation).
///   plus  (omega_s + omega_2 = omega_1 + omega_i): b(w1) + b(wi) - b(w2) - b(ws)
///   minus (omega_1 + omega_2 = omega_s + omega_i): b(ws) + b(wi) - b(w1) - b(w2)
double linear_phase_mismatch(const DispersionProfile& profile, double omega_p1, double omega_p2,
                             double omega_s, double omega_i, Branch b);

/// gamma1 P1 - gamma2 P2.
double nonlinear_phase_mismatch(double gamma1, double p1, double gamma2, double p2);

struct PhaseMismatch {
  double linear = 0.0;     // rad/m
  double nonlinear = 0.0;  // rad/m, branch-oriented Kerr contribution
  double total = 0.0;      // linear + nonlinear
};

struct BraggScatteringSetup {
  double omega_p1 = 0.0;
  double omega_p2 = 0.0;
  double omega_s = 0.0;
  double p1 = 0.0;  // W
  double p2 = 0.0;
  double gamma1 = 0.0;  // 1/(W m)
  double gamma2 = 0.0;
  std::shared_ptr<const DispersionProfile> profile;
  double length = 0.0;        // m
  double signal_power = 0.0;  // W, bookkeeping only

  /// Throws DomainError on a broken invariant.
  void validate() const;
};

struct ConversionResult {
  double eta = 0.0;
  double idler_omega = 0.0;
  Branch branch = Branch::Plus;
  PhaseMismatch mismatch;
  double g = 0.0;  // rad/m
};

/// Total mismatch for a branch. The Kerr contribution follows the
/// self/cross-phase bookkeeping of the four waves: for the plus branch it is
/// -(gamma1 P1 - gamma2 P2), for the minus branch +(gamma1 P1 + gamma2 P2).
PhaseMismatch phase_mismatch(const BraggScatteringSetup& s, Branch b);

/// eta(z) = (4 g1 g2 P1 P2 / g^2) sin^2(g z), g^2 = 4 g1 g2 P1 P2 + (kappa/2)^2.
ConversionResult conversion_efficiency(const BraggScatteringSetup& s, Branch b, double z);

struct CurvePoint {
  double omega_s;
  double omega_i;
  double kappa;
  double eta;
  double eta_normalized;
};

/// Sweeps the signal over [omega_min, omega_max] (uniform in omega, ascending)
/// at z = length and normalizes to the curve maximum.
std::vector<CurvePoint> phase_matching_curve(const BraggScatteringSetup& s, double omega_min,
                                             double omega_max, int n_points, Branch b,
                                             Execution exec = Execution::Parallel);

struct NullWidth {
  double omega_peak;
  double omega_left;   // first null below the peak
  double omega_right;  // first null above the peak
  double width() const { return omega_right - omega_left; }
};

/// Locates the main lobe of the curve on a coarse sweep and refines both
/// adjacent minima by golden-section search on the signal frequency.
NullWidth first_null_width(const BraggScatteringSetup& s, double omega_min, double omega_max,
                           Branch b, int coarse_points = 2001);

enum class DispersionRegime { Normal, Anomalous };

struct ModulationInstabilityReport {
  DispersionRegime regime;
  double beta2;          // s^2/m at the pump
  double peak_gain;      // field growth rate, 1/m
  double peak_detuning;  // rad/s
};

ModulationInstabilityReport modulation_instability_check(const DispersionProfile& profile,
                                                         double omega_pump, double power,
                                                         double gamma);

}  // namespace fwmbs
