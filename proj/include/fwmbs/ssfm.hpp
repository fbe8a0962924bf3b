#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fwmbs/cmt.hpp"
#include "fwmbs/execution.hpp"
#include "fwmbs/fft.hpp"
#include "fwmbs/modesolver.hpp"

namespace fwmbs {

/// Periodic time window of n_points samples; frequency bin k sits at
/// carrier + k * d_omega for k < n/2 and carrier + (k - n) * d_omega above.
struct TimeFrequencyGrid {
  std::size_t n_points = 0;
  double time_window = 0.0;    // s
  double carrier_omega = 0.0;  // rad/s

  double d_omega() const;
  double span_omega() const { return d_omega() * static_cast<double>(n_points); }
  double bin_omega(std::size_t k) const;
  /// Nearest bin; nullopt if omega is outside the grid span.
  std::optional<std::size_t> bin_of(double omega) const;
};

struct Tone {
  double omega = 0.0;  // rad/s
  double power = 0.0;  // W
  double phase = 0.0;  // rad
};

struct GridPolicy {
  double margin_factor = 1.5;      // span >= margin * tone spread
  double max_relative_snap = 1e-6; // worst-case |snapped - requested| / requested
  std::size_t min_points = std::size_t{1} << 10;
  std::size_t max_points = std::size_t{1} << 22;
};

struct SnappedTone {
  Tone requested;
  std::size_t bin = 0;
  double omega = 0.0;  // bin frequency actually used
  double relative_error = 0.0;
};

struct GridBuild {
  TimeFrequencyGrid grid;
  std::vector<SnappedTone> tones;  // in input order
};

/// Smallest power-of-two grid whose span covers the tones with the margin
/// and whose bin spacing keeps every tone within max_relative_snap.
GridBuild build_grid(std::span<const Tone> tones, const GridPolicy& policy = {});
SnappedTone snap(const TimeFrequencyGrid& grid, const Tone& tone);

class FieldEnvelope {
 public:
  FieldEnvelope(TimeFrequencyGrid grid, ComplexVector samples);

  const TimeFrequencyGrid& grid() const { return grid_; }
  std::span<const Complex> samples() const { return samples_; }
  std::span<Complex> samples() { return samples_; }

  /// Mean |a|^2 over the window, W.
  double total_power() const;
  /// Complex amplitude per bin (sqrt(W)).
  ComplexVector spectrum() const;
  /// |A_k|^2 per bin, W.
  std::vector<double> spectral_power() const;

 private:
  TimeFrequencyGrid grid_;
  ComplexVector samples_;
};

/// CW tones as single bins. Throws DomainError when two tones share a bin
/// or a tone falls outside the grid.
FieldEnvelope inject_cw_tones(const TimeFrequencyGrid& grid, std::span<const Tone> tones);

/// exp(-(t/t0)^(2 m) / 2) pulse centred in the window, carried at the bin
/// nearest omega. Quasi-CW check for pulsed pumping.
FieldEnvelope inject_super_gaussian(const TimeFrequencyGrid& grid, double omega, double peak_power,
                                    double t0, int order);

/// Sum of spectral power over bins with omega in [center - bw/2, center + bw/2).
double band_power(const FieldEnvelope& field, double omega_center, double bandwidth);
double band_power(const TimeFrequencyGrid& grid, std::span<const double> spectral_power,
                  double omega_center, double bandwidth);

inline constexpr double kMaxNonlinearPhasePerStep = 0.05;  // rad
inline constexpr double kMaxPowerOutsideTable = 0.01;      // fraction of total

struct PropagationSpec {
  std::shared_ptr<const DispersionProfile> profile;
  double gamma_carrier = 0.0;  // 1/(W m)
  double length = 0.0;         // m
  double step = 0.0;           // m, rounded down so that length / step is an integer
  double loss_db_per_m = 0.0;
};

struct RunLog {
  std::size_t steps = 0;
  double step = 0.0;
  double max_nonlinear_phase = 0.0;
  double initial_power = 0.0;
  double final_power = 0.0;
  double power_outside_table = 0.0;  // fraction, worst observed

  double relative_power_change() const;
};

struct Propagation {
  FieldEnvelope field;
  RunLog log;
};

/// Symmetric split-step: half dispersion, full Kerr, half dispersion, with
/// the exact tabulated phase beta(w) - beta0 - beta1 (w - w0) per bin.
/// Bins outside the table carry no dispersion; if more than 1 % of the power
/// sits there the run aborts with SpectralOverflowError.
Propagation propagate(const FieldEnvelope& input, const PropagationSpec& spec,
                      Execution exec = Execution::Parallel);

// ---------------------------------------------------------------------------

struct ExperimentPolicy {
  GridPolicy grid;
  /// Nonlinear phase targeted per step (must stay below the hard bound).
  double target_phase_per_step = 0.02;
  std::size_t min_steps = 64;
  /// Overrides the automatic step choice when positive.
  double step = 0.0;
  /// Kerr coefficient used by the single-envelope model; when unset the
  /// profile's gamma at the carrier is used, falling back to
  /// sqrt(gamma1 gamma2) for profiles without gamma data.
  std::optional<double> gamma_carrier;
  double loss_db_per_m = 0.0;
  /// Spectrum export keeps bins above this power.
  double spectrum_floor_w = 1e-20;
};

struct SpectrumLine {
  double omega;
  double power;
};

struct ExperimentResult {
  GridBuild grid;
  double gamma_carrier = 0.0;
  double signal_power = 0.0;
  double idler_plus_omega = 0.0;
  double idler_minus_omega = 0.0;
  double eta_plus = 0.0;
  double eta_minus = 0.0;
  double signal_out = 0.0;  // W
  double conserved_power_error = 0.0;
  RunLog log;
  std::vector<SpectrumLine> spectrum;  // bins above the floor, ascending omega
};

/// Injects both pumps and a weak signal, propagates the full length and
/// reports the idler band powers relative to the launched signal power.
ExperimentResult bs_conversion_experiment(const BraggScatteringSetup& setup,
                                          const ExperimentPolicy& policy = {},
                                          Execution exec = Execution::Parallel);

/// The launched signal power the experiment will use for this setup.
double experiment_signal_power(const BraggScatteringSetup& setup);

}  // namespace fwmbs
