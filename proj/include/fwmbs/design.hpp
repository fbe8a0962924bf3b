#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwmbs/execution.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/ssfm.hpp"

namespace fwmbs {

struct DesignTarget {
  double lambda_sps = 780e-9;       // emitter (signal) wavelength, m
  double lambda_telecom = 1550e-9;  // second pump, m
  double height = 550e-9;
  double length = 18e-3;
  double eta_target = 0.25;
  double pump_offset = 6e-9;  // pump 1 sits this far below the emitter line

  void validate() const;
  double zdw_target() const { return 0.5 * (lambda_sps + lambda_telecom); }
};

struct EmitterPreset {
  std::string_view key;
  std::string_view label;
  double lambda;  // m
};

std::span<const EmitterPreset> emitter_presets();
/// nullptr if the key is unknown.
const EmitterPreset* find_emitter(std::string_view key);

struct WidthRange {
  double min = 0.8e-6;
  double max = 2.3e-6;
};

struct DesignOptions {
  /// Materials and claddings; width and height are overwritten.
  WaveguideGeometry base;
  Polarization polarization = Polarization::TE;
  double n2 = kDefaultN2;
  WidthRange widths;
  /// Table used for ZDW evaluation and for the split-step runs.
  double table_lambda_min = 500e-9;
  double table_lambda_max = 2400e-9;
  int table_points = 512;
  double zdw_tolerance = 1e-9;  // m

  /// After the ZDW rule, move the width to where the linear mismatch of the
  /// wavelength-exchange idler vanishes.
  bool refine_phase_matching = true;

  bool run_ssfm = true;
  double power_step = 1.25;
  double power_cap = 50.0;          // W
  double power_tolerance = 0.01;    // relative, on the bisected crossing
  ExperimentPolicy experiment;
  Execution exec = Execution::Parallel;
};

/// Shortest-wavelength zero of beta2 for the geometry, or nullopt if the
/// table has none. `all_normal` tells which side a root-free table lies on.
struct ZdwProbe {
  std::optional<double> zdw;
  bool all_normal = false;
};
ZdwProbe probe_zdw(const MaterialDb& db, const WaveguideGeometry& g, const DesignOptions& opt);

/// Bisects the width (height fixed) until the first ZDW is within the
/// tolerance of the target. Throws UnreachableTargetError with the
/// achievable range when the endpoints do not bracket it.
double find_width_for_zdw(const MaterialDb& db, double target_zdw, double height,
                          const DesignOptions& opt = {});

/// Per-pump power (P1 = P2) for eta_target at zero mismatch.
double required_pump_power(double gamma1, double gamma2, double length, double eta_target);

struct DesignReport {
  DesignTarget target;
  double zdw_target = 0.0;
  double width_zdw_rule = 0.0;  // width from the ZDW rule alone
  double width = 0.0;           // final width
  std::optional<double> lambda_zdw;  // first ZDW at the final width
  double lambda_p1 = 0.0, lambda_p2 = 0.0, lambda_signal = 0.0, lambda_idler = 0.0;
  double d_at_sps = 0.0;      // at pump 1, ps/(nm km)
  double d_at_telecom = 0.0;  // at pump 2
  double gamma_p1 = 0.0, gamma_p2 = 0.0;
  double kappa_linear = 0.0;  // rad/m, wavelength-exchange idler at the final width
  double pump_power_analytic = 0.0;
  std::optional<double> pump_power_ssfm;
  double eta_ssfm = 0.0;  // at pump_power_ssfm
  std::size_t ssfm_runs = 0;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kWarnModulationInstability = "modulation-instability";
inline constexpr std::string_view kWarnNearZeroDispersion = "near-zero-dispersion";

DesignReport design_for_sps(const MaterialDb& db, const DesignTarget& target,
                            const DesignOptions& opt = {});

}  // namespace fwmbs
