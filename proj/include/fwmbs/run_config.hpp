#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "fwmbs/cmt.hpp"
#include "fwmbs/design.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/ssfm.hpp"

// Run configuration for the command-line tool. Sections and keys:
//
//   [waveguide]   width, height, length (length units); core, top_clad,
//                 substrate (material ids); polarization = TE|TM;
//                 n2 (m2/W)
//   [dispersion]  lambda_min, lambda_max (length); points (integer)
//   [setup]       pump1, pump2, signal (length); power1, power2 (power);
//                 gamma1, gamma2 (/W/m or auto); signal_power (power)
//   [analytic]    signal_min, signal_max (length); points; branch = plus|minus
//   [propagation] step (length or auto); loss (dB/m); margin; min_steps;
//                 phase_per_step (rad); gamma (/W/m or auto);
//                 spectrum_floor (power)
//   [sweep]       axis = pump_power|signal|width; start, stop (units of the
//                 axis); points
//   [design]      emitter (preset key) or lambda_sps (length); telecom,
//                 pump_offset (length); eta_target; width_min, width_max
//                 (length); ssfm, refine = true|false; power_cap (power)
//
// Every dimensioned value needs a unit; unknown sections or keys are errors.

namespace fwmbs {

struct SetupConfig {
  double lambda_p1 = 0.0, lambda_p2 = 0.0, lambda_s = 0.0;
  double p1 = 0.0, p2 = 0.0;
  std::optional<double> gamma1, gamma2;  // nullopt: computed from the mode
  std::optional<double> signal_power;
};

struct AnalyticConfig {
  double signal_min = 0.0, signal_max = 0.0;
  int points = 201;
  Branch branch = Branch::Plus;
};

struct PropagationConfig {
  std::optional<double> step;  // nullopt: automatic
  double loss_db_per_m = 0.0;
  double margin = 1.5;
  std::size_t min_steps = 64;
  double phase_per_step = 0.02;
  std::optional<double> gamma;  // nullopt: profile gamma at the carrier
  double spectrum_floor = 1e-20;
};

enum class SweepAxis { PumpPower, Signal, Width };
std::string to_string(SweepAxis a);

struct SweepConfig {
  SweepAxis axis = SweepAxis::PumpPower;
  double start = 0.0, stop = 0.0;  // SI units of the axis
  int points = 1;
};

struct DesignConfig {
  DesignTarget target;
  std::string emitter;  // preset key, empty when lambda_sps was given
  WidthRange widths;
  bool run_ssfm = true;
  bool refine = true;
  double power_cap = 50.0;
};

struct RunConfig {
  std::string source;
  std::string hash;  // SHA-256 of the file bytes

  WaveguideGeometry geometry;
  Polarization polarization = Polarization::TE;
  double n2 = kDefaultN2;
  double lambda_min = 500e-9, lambda_max = 2400e-9;
  int table_points = 512;

  std::optional<SetupConfig> setup;
  std::optional<AnalyticConfig> analytic;
  PropagationConfig propagation;
  std::optional<SweepConfig> sweep;
  std::optional<DesignConfig> design;

  TableRequest table_request() const;
  ExperimentPolicy experiment_policy() const;
  DesignOptions design_options(Execution exec) const;
};

/// Throws ParseError/ConfigError with file and line on any problem.
RunConfig parse_run_config(std::string_view text, std::string source_name);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every parsed input, SI units, for manifests.
nlohmann::json to_json(const RunConfig& c);

std::shared_ptr<const DispersionProfile> build_profile(const MaterialDb& db, const RunConfig& c,
                                                       Execution exec);
/// Requires a [setup] section; "auto" gammas come from the mode at each pump.
BraggScatteringSetup build_setup(const MaterialDb& db, const RunConfig& c,
                                 std::shared_ptr<const DispersionProfile> profile);

}  // namespace fwmbs
