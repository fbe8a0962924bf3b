// fwmbs command-line front end. Exit codes: 0 ok, 1 bad input/config,
// 2 physics or numerics failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fwmbs/cmt.hpp"
#include "fwmbs/design.hpp"
#include "fwmbs/errors.hpp"
#include "fwmbs/export.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/run_config.hpp"
#include "fwmbs/ssfm.hpp"
#include "fwmbs/units.hpp"

namespace fs = std::filesystem;
using namespace fwmbs;

namespace {

struct Globals {
  std::string config;
  std::string materials;
  std::string out;
  int jobs = 1;
  long seed = 0;  // reserved; nothing is stochastic
};

MaterialDb load_db(const Globals& g) {
  return load_material_db(g.materials.empty() ? default_materials_path() : fs::path(g.materials));
}

RunConfig load_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required for this command");
  return load_run_config(g.config);
}

std::string nm(double lambda_m) { return format_number(lambda_m * 1e9); }

fs::path out_or(const Globals& g, const char* fallback) {
  return g.out.empty() ? fs::path(fallback) : fs::path(g.out);
}

fs::path with_extension(fs::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

void print(std::string_view key, std::string_view value) { std::cout << key << '=' << value << '\n'; }

// ---------------------------------------------------------------------------

int cmd_materials(const Globals& g) {
  const MaterialDb db = load_db(g);
  print("materials_source", db.source);
  print("materials_hash", db.content_hash);
  for (const auto& id : db.ids()) {
    const auto& m = db.get(id);
    std::visit(
        [&](const auto& model) {
          using T = std::decay_t<decltype(model)>;
          const bool sellmeier = std::is_same_v<T, SellmeierModel>;
          const double probe = std::clamp(1550e-9, model.lambda_min, model.lambda_max);
          std::cout << fmt::format("material={} kind={} range_nm={}-{} n_at_{}nm={}\n", id,
                                   sellmeier ? "sellmeier" : "constant", nm(model.lambda_min),
                                   nm(model.lambda_max), nm(probe),
                                   format_number(refractive_index(m, probe)));
        },
        m);
  }
  return 0;
}

int cmd_dispersion(const Globals& g) {
  const RunConfig cfg = load_config(g);
  const MaterialDb db = load_db(g);
  const auto profile = build_profile(db, cfg, Execution::Parallel);
  std::ostringstream csv;
  write_profile_csv(csv, *profile, cfg.hash);
  const fs::path out = out_or(g, "dispersion.csv");
  write_file(out, csv.str());

  const auto zdw = zero_dispersion_wavelengths(*profile);
  std::string list;
  for (double z : zdw) list += (list.empty() ? "" : ",") + nm(z);
  print("config_hash", cfg.hash);
  print("points", std::to_string(profile->size()));
  print("zdw_count", std::to_string(zdw.size()));
  print("zdw_nm", list.empty() ? "none" : list);
  print("out", out.string());
  return 0;
}

int cmd_analytic(const Globals& g) {
  const RunConfig cfg = load_config(g);
  if (!cfg.analytic) throw ConfigError(cfg.source + ": analytic needs an [analytic] section");
  const MaterialDb db = load_db(g);
  const auto profile = build_profile(db, cfg, Execution::Parallel);
  const BraggScatteringSetup s = build_setup(db, cfg, profile);
  const auto& a = *cfg.analytic;
  const auto curve =
      phase_matching_curve(s, omega_from_lambda(a.signal_max), omega_from_lambda(a.signal_min),
                           a.points, a.branch);
  std::ostringstream csv;
  write_curve_csv(csv, curve, cfg.hash);
  const fs::path out = out_or(g, "curve.csv");
  write_file(out, csv.str());

  // Summary at the configured signal; a one-point curve also copes with L = 0.
  const auto at = phase_matching_curve(s, s.omega_s, s.omega_s, 1, a.branch).front();
  print("config_hash", cfg.hash);
  print("branch", to_string(a.branch));
  print("gamma1_W_m", format_number(s.gamma1));
  print("gamma2_W_m", format_number(s.gamma2));
  print("signal_nm", nm(lambda_from_omega(s.omega_s)));
  print("idler_nm", nm(lambda_from_omega(at.omega_i)));
  print("kappa_rad_m", format_number(at.kappa));
  print("eta", format_number(at.eta));
  print("rows", std::to_string(curve.size()));
  print("out", out.string());
  return 0;
}

// One split-step run plus its outputs; shared by propagate and sweep.
struct RunOutput {
  ExperimentResult result;
  ConversionResult cmt_plus, cmt_minus;
};

RunOutput run_experiment(const BraggScatteringSetup& s, const RunConfig& cfg, Execution exec) {
  RunOutput o;
  o.result = bs_conversion_experiment(s, cfg.experiment_policy(), exec);
  o.cmt_plus = conversion_efficiency(s, Branch::Plus, s.length);
  o.cmt_minus = conversion_efficiency(s, Branch::Minus, s.length);
  return o;
}

std::string manifest(const RunConfig& cfg, const MaterialDb& db, const BraggScatteringSetup& s,
                     const RunOutput& o) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = tool_version();
  j["config"] = to_json(cfg);
  j["materials"] = {{"source", db.source}, {"hash", db.content_hash}};
  j["setup"] = {{"pump1_nm", lambda_from_omega(s.omega_p1) * 1e9},
                {"pump2_nm", lambda_from_omega(s.omega_p2) * 1e9},
                {"signal_nm", lambda_from_omega(s.omega_s) * 1e9},
                {"power1_w", s.p1},
                {"power2_w", s.p2},
                {"gamma1_W_m", s.gamma1},
                {"gamma2_W_m", s.gamma2},
                {"length_m", s.length}};
  j["result"] = to_json(o.result);
  j["analytic"] = {{"eta_plus", o.cmt_plus.eta},
                   {"eta_minus", o.cmt_minus.eta},
                   {"kappa_plus_rad_m", o.cmt_plus.mismatch.total},
                   {"kappa_minus_rad_m", o.cmt_minus.mismatch.total}};
  return j.dump(2) + "\n";
}

std::string spectrum_csv(const RunConfig& cfg, const ExperimentResult& r) {
  std::ostringstream csv;
  write_spectrum_csv(csv, r.spectrum, cfg.hash);
  return csv.str();
}

int cmd_propagate(const Globals& g) {
  const RunConfig cfg = load_config(g);
  const MaterialDb db = load_db(g);
  const auto profile = build_profile(db, cfg, Execution::Parallel);
  const BraggScatteringSetup s = build_setup(db, cfg, profile);
  const RunOutput o = run_experiment(s, cfg, Execution::Parallel);

  const fs::path out = out_or(g, "spectrum.csv");
  const fs::path man = with_extension(out, ".json");
  write_file(out, spectrum_csv(cfg, o.result));
  write_file(man, manifest(cfg, db, s, o));

  print("config_hash", cfg.hash);
  print("n_points", std::to_string(o.result.grid.grid.n_points));
  print("steps", std::to_string(o.result.log.steps));
  print("eta_plus", format_number(o.result.eta_plus));
  print("eta_minus", format_number(o.result.eta_minus));
  print("eta_plus_analytic", format_number(o.cmt_plus.eta));
  print("eta_minus_analytic", format_number(o.cmt_minus.eta));
  print("conserved_power_error", format_number(o.result.conserved_power_error));
  print("out", out.string());
  print("manifest", man.string());
  return 0;
}

std::optional<double> parse_emitter_wavelength(const std::string& s) {
  std::string t = s;
  if (t.size() > 2 && t.compare(t.size() - 2, 2, "nm") == 0) t.resize(t.size() - 2);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size() || !(v > 0.0)) return std::nullopt;
    return v * 1e-9;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int cmd_design(const Globals& g, const std::string& emitter, bool no_ssfm) {
  RunConfig cfg;
  if (!g.config.empty()) cfg = load_config(g);
  DesignConfig d = cfg.design.value_or(DesignConfig{});
  if (!cfg.design) d.target.height = cfg.geometry.height;
  if (!emitter.empty()) {
    if (const auto* p = find_emitter(emitter)) {
      d.emitter = std::string(p->key);
      d.target.lambda_sps = p->lambda;
    } else if (const auto lam = parse_emitter_wavelength(emitter)) {
      d.emitter.clear();
      d.target.lambda_sps = *lam;
    } else {
      std::string keys;
      for (const auto& p : emitter_presets())
        keys += fmt::format("{}{} ({} nm)", keys.empty() ? "" : ", ", p.key, nm(p.lambda));
      throw ConfigError(fmt::format("unknown emitter '{}'; presets: {}; or a wavelength like 780nm",
                                    emitter, keys));
    }
  } else if (!cfg.design) {
    throw ConfigError("design needs --emitter or a [design] section in --config");
  }
  d.target.validate();
  if (no_ssfm) d.run_ssfm = false;
  cfg.design = d;

  const MaterialDb db = load_db(g);
  DesignOptions opt = cfg.design_options(Execution::Parallel);
  const DesignReport r = design_for_sps(db, d.target, opt);

  nlohmann::json j = to_json(r);
  j["emitter"] = d.emitter;
  j["config_hash"] = cfg.hash;
  j["materials"] = {{"source", db.source}, {"hash", db.content_hash}};
  const fs::path out = out_or(g, "design.json");
  write_file(out, j.dump(2) + "\n");
  const std::vector<DesignReport> one{r};
  write_file(with_extension(out, ".txt"), design_table(one));

  print("emitter", d.emitter.empty() ? "custom" : d.emitter);
  print("lambda_sps_nm", nm(d.target.lambda_sps));
  print("zdw_target_nm", nm(r.zdw_target));
  print("width_zdw_rule_nm", nm(r.width_zdw_rule));
  print("width_nm", nm(r.width));
  print("lambda_zdw_nm", r.lambda_zdw ? nm(*r.lambda_zdw) : "none");
  print("D_at_sps_ps_nm_km", format_number(r.d_at_sps));
  print("D_at_telecom_ps_nm_km", format_number(r.d_at_telecom));
  print("pump_power_analytic_w", format_number(r.pump_power_analytic));
  print("pump_power_ssfm_w", r.pump_power_ssfm ? format_number(*r.pump_power_ssfm) : "none");
  print("warnings", std::to_string(r.warnings.size()));
  for (const auto& w : r.warnings) print("warning", w);
  print("out", out.string());
  return 0;
}

int cmd_sweep(const Globals& g) {
  const RunConfig cfg = load_config(g);
  if (!cfg.sweep) throw ConfigError(cfg.source + ": sweep needs a [sweep] section");
  const MaterialDb db = load_db(g);
  const auto& sw = *cfg.sweep;

  std::vector<double> values(static_cast<std::size_t>(sw.points));
  for (int i = 0; i < sw.points; ++i)
    values[i] = sw.points == 1 ? sw.start : sw.start + (sw.stop - sw.start) * i / (sw.points - 1);
  std::sort(values.begin(), values.end());

  const auto base_profile =
      sw.axis == SweepAxis::Width ? nullptr : build_profile(db, cfg, Execution::Parallel);

  struct Point {
    BraggScatteringSetup setup;
    RunOutput out;
    RunConfig cfg;
  };
  std::vector<Point> points(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  const int jobs = std::max(1, std::min<int>(g.jobs, static_cast<int>(values.size())));
  const Execution exec = jobs > 1 ? Execution::Serial : Execution::Parallel;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < values.size();) {
      try {
        RunConfig local = cfg;
        std::shared_ptr<const DispersionProfile> profile = base_profile;
        if (sw.axis == SweepAxis::Width) {
          local.geometry.width = values[i];
          profile = build_profile(db, local, exec);
        } else if (sw.axis == SweepAxis::Signal) {
          if (!local.setup) throw ConfigError(cfg.source + ": sweep needs a [setup] section");
          local.setup->lambda_s = values[i];
        } else if (local.setup) {
          local.setup->p1 = local.setup->p2 = values[i];
        }
        Point& p = points[i];
        p.setup = build_setup(db, local, profile);
        p.out = run_experiment(p.setup, local, exec);
        p.cfg = std::move(local);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const fs::path dir = out_or(g, "sweep");
  fs::create_directories(dir);
  const char* unit = sw.axis == SweepAxis::PumpPower ? "w" : "nm";
  const double scale = sw.axis == SweepAxis::PumpPower ? 1.0 : 1e9;
  std::ostringstream csv;
  csv << "# schema_version=" << kSchemaVersion << "\n# config_hash=" << cfg.hash
      << "\n# generator=fwmbs " << tool_version() << "\n";
  csv << to_string(sw.axis) << '_' << unit
      << ",eta_plus,eta_minus,eta_plus_analytic,eta_minus_analytic,conserved_power_error,steps,"
         "n_points\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto stem = dir / fmt::format("point_{:04d}", i);
    // Point files use the original config so a one-point sweep reproduces
    // propagate byte for byte.
    write_file(with_extension(stem, ".csv"), spectrum_csv(cfg, p.out.result));
    write_file(with_extension(stem, ".json"), manifest(cfg, db, p.setup, p.out));
    csv << format_number(values[i] * scale) << ',' << format_number(p.out.result.eta_plus) << ','
        << format_number(p.out.result.eta_minus) << ',' << format_number(p.out.cmt_plus.eta) << ','
        << format_number(p.out.cmt_minus.eta) << ','
        << format_number(p.out.result.conserved_power_error) << ',' << p.out.result.log.steps
        << ',' << p.out.result.grid.grid.n_points << '\n';
  }
  write_file(dir / "sweep.csv", csv.str());
  print("config_hash", cfg.hash);
  print("axis", to_string(sw.axis));
  print("points", std::to_string(points.size()));
  print("jobs", std::to_string(jobs));
  print("out", (dir / "sweep.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-wave-mixing Bragg-scattering frequency conversion in Si3N4 waveguides"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "run configuration file");
  app.add_option("--materials", g.materials,
                 "material database (default: $FWMBS_MATERIALS or the bundled file)");
  app.add_option("--out", g.out, "output file (directory for sweep)");
  app.add_option("--jobs", g.jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "reserved; all paths are deterministic");
  app.fallthrough();

  std::string emitter;
  bool no_ssfm = false;
  auto* disp = app.add_subcommand("dispersion", "tabulate n_eff, beta, D and gamma; print ZDWs");
  auto* ana = app.add_subcommand("analytic", "coupled-mode phase-matching curve");
  auto* prop = app.add_subcommand("propagate", "one split-step run: spectrum + manifest");
  auto* des = app.add_subcommand("design", "width and pump power for an emitter");
  des->add_option("--emitter", emitter, "preset (nv637, rb780, cs852, qd980) or wavelength, e.g. 780nm");
  des->add_flag("--no-ssfm", no_ssfm, "skip the split-step power refinement");
  auto* swp = app.add_subcommand("sweep", "parallel parameter sweep");
  auto* mat = app.add_subcommand("materials", "list and validate the material database");
  for (auto* sub : {disp, ana, prop, des, swp, mat}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*disp) return cmd_dispersion(g);
    if (*ana) return cmd_analytic(g);
    if (*prop) return cmd_propagate(g);
    if (*des) return cmd_design(g, emitter, no_ssfm);
    if (*swp) return cmd_sweep(g);
    if (*mat) return cmd_materials(g);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
