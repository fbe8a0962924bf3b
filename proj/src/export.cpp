#include "fwmbs/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "fwmbs/errors.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

void write_preamble(std::ostream& os, std::string_view hash) {
  os << "# schema_version=" << kSchemaVersion << '\n'
     << "# config_hash=" << hash << '\n'
     << "# generator=fwmbs " << tool_version() << '\n';
}

double nm(double lambda_m) { return lambda_m * 1e9; }

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string tool_version() { return FWMBS_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

void write_profile_csv(std::ostream& os, const DispersionProfile& p, std::string_view hash) {
  write_preamble(os, hash);
  os << "lambda_nm,omega_rad_s,n_eff,beta_rad_m,beta2_s2_m,D_ps_nm_km,gamma_W_m\n";
  const auto w = p.omega();
  const auto b = p.beta();
  const auto b2 = p.beta2();
  const auto g = p.gamma();
  // Ascending wavelength.
  for (std::size_t k = p.size(); k-- > 0;) {
    const double lam = lambda_from_omega(w[k]);
    const double d = dispersion_parameter(Beta2{b2[k]}, Wavelength{lam}).ps_per_nm_km();
    os << format_number(nm(lam)) << ',' << format_number(w[k]) << ','
       << format_number(b[k] * kSpeedOfLight / w[k]) << ',' << format_number(b[k]) << ','
       << format_number(b2[k]) << ',' << format_number(d) << ',' << format_number(g[k]) << '\n';
  }
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve, std::string_view hash) {
  write_preamble(os, hash);
  os << "lambda_s_nm,lambda_i_nm,kappa_rad_m,eta,eta_db,eta_normalized\n";
  std::vector<CurvePoint> rows(curve.begin(), curve.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.omega_s > b.omega_s; });
  for (const auto& c : rows) {
    const double db = c.eta > 0.0 ? 10.0 * std::log10(c.eta) : -INFINITY;
    os << format_number(nm(lambda_from_omega(c.omega_s))) << ','
       << format_number(nm(lambda_from_omega(c.omega_i))) << ',' << format_number(c.kappa) << ','
       << format_number(c.eta) << ',' << format_number(db) << ','
       << format_number(c.eta_normalized) << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumLine> spectrum,
                        std::string_view hash) {
  write_preamble(os, hash);
  os << "lambda_nm,power_w,power_dbm\n";
  std::vector<SpectrumLine> rows(spectrum.begin(), spectrum.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SpectrumLine& a, const SpectrumLine& b) { return a.omega > b.omega; });
  for (const auto& s : rows) {
    const double dbm = s.power > 0.0 ? 10.0 * std::log10(s.power * 1e3) : -INFINITY;
    os << format_number(nm(lambda_from_omega(s.omega))) << ',' << format_number(s.power) << ','
       << format_number(dbm) << '\n';
  }
}

nlohmann::json to_json(const GridBuild& g) {
  nlohmann::json tones = nlohmann::json::array();
  for (const auto& t : g.tones)
    tones.push_back({{"requested_nm", nm(lambda_from_omega(t.requested.omega))},
                     {"snapped_nm", nm(lambda_from_omega(t.omega))},
                     {"power_w", t.requested.power},
                     {"relative_snap_error", t.relative_error}});
  return {{"n_points", g.grid.n_points},
          {"time_window_s", g.grid.time_window},
          {"carrier_omega_rad_s", g.grid.carrier_omega},
          {"carrier_nm", nm(lambda_from_omega(g.grid.carrier_omega))},
          {"bin_spacing_rad_s", g.grid.d_omega()},
          {"tones", tones}};
}

nlohmann::json to_json(const RunLog& log) {
  return {{"steps", log.steps},
          {"step_m", log.step},
          {"max_nonlinear_phase_rad", log.max_nonlinear_phase},
          {"initial_power_w", log.initial_power},
          {"final_power_w", log.final_power},
          {"relative_power_change", number_or_null(log.relative_power_change())},
          {"max_power_fraction_outside_table", log.power_outside_table}};
}

nlohmann::json to_json(const ExperimentResult& r) {
  const auto db = [](double eta) { return eta > 0.0 ? 10.0 * std::log10(eta) : -INFINITY; };
  return {{"grid", to_json(r.grid)},
          {"gamma_carrier_W_m", r.gamma_carrier},
          {"signal_power_w", r.signal_power},
          {"idler_plus_nm", nm(lambda_from_omega(r.idler_plus_omega))},
          {"idler_minus_nm", nm(lambda_from_omega(r.idler_minus_omega))},
          {"eta_plus", r.eta_plus},
          {"eta_minus", r.eta_minus},
          {"eta_plus_db", number_or_null(db(r.eta_plus))},
          {"eta_minus_db", number_or_null(db(r.eta_minus))},
          {"signal_out_w", r.signal_out},
          {"conserved_power_error", number_or_null(r.conserved_power_error)},
          {"run", to_json(r.log)}};
}

nlohmann::json to_json(const DesignTarget& t) {
  return {{"lambda_sps_nm", nm(t.lambda_sps)},   {"lambda_telecom_nm", nm(t.lambda_telecom)},
          {"height_nm", nm(t.height)},           {"length_m", t.length},
          {"eta_target", t.eta_target},          {"pump_offset_nm", nm(t.pump_offset)}};
}

nlohmann::json to_json(const DesignReport& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = tool_version();
  j["target"] = to_json(r.target);
  j["zdw_target_nm"] = nm(r.zdw_target);
  j["width_zdw_rule_nm"] = nm(r.width_zdw_rule);
  j["width_nm"] = nm(r.width);
  j["lambda_zdw_nm"] = r.lambda_zdw ? nlohmann::json(nm(*r.lambda_zdw)) : nlohmann::json(nullptr);
  j["lambda_pump1_nm"] = nm(r.lambda_p1);
  j["lambda_pump2_nm"] = nm(r.lambda_p2);
  j["lambda_signal_nm"] = nm(r.lambda_signal);
  j["lambda_idler_nm"] = nm(r.lambda_idler);
  j["D_at_sps_ps_nm_km"] = r.d_at_sps;
  j["D_at_telecom_ps_nm_km"] = r.d_at_telecom;
  j["gamma_at_each_pump_W_m"] = {r.gamma_p1, r.gamma_p2};
  j["kappa_linear_rad_m"] = r.kappa_linear;
  j["pump_power_analytic_w"] = r.pump_power_analytic;
  j["pump_power_ssfm_w"] =
      r.pump_power_ssfm ? nlohmann::json(*r.pump_power_ssfm) : nlohmann::json(nullptr);
  j["eta_ssfm"] = r.eta_ssfm;
  j["ssfm_runs"] = r.ssfm_runs;
  j["warnings"] = r.warnings;
  return j;
}

std::string design_table(std::span<const DesignReport> reports) {
  std::string out = fmt::format("{:>10}  {:>10}  {:>10}  {:>14}  {:>12}\n", "lambda_nm",
                                "width_nm", "zdw_nm", "P_analytic_W", "P_ssfm_W");
  for (const auto& r : reports) {
    out += fmt::format("{:>10.1f}  {:>10.1f}  {:>10}  {:>14.3f}  {:>12}\n", nm(r.target.lambda_sps),
                       nm(r.width),
                       r.lambda_zdw ? fmt::format("{:.1f}", nm(*r.lambda_zdw)) : "-",
                       r.pump_power_analytic,
                       r.pump_power_ssfm ? fmt::format("{:.3f}", *r.pump_power_ssfm) : "-");
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError(fmt::format("cannot open {} for writing", path.string()));
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw InputError(fmt::format("failed writing {}", path.string()));
}

}  // namespace fwmbs
