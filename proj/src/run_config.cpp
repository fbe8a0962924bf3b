#include "fwmbs/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fwmbs/errors.hpp"
#include "fwmbs/export.hpp"
#include "fwmbs/kvconfig.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

using kv::Dimension;

struct Reader {
  const kv::Document& doc;
  const kv::Section& sec;

  const kv::Entry* find(std::string_view key) const { return sec.find(key); }
  const kv::Entry& need(std::string_view key) const {
    if (const auto* e = sec.find(key)) return *e;
    throw ParseError(doc.source, sec.line,
                     fmt::format("[{}] is missing required key '{}'", sec.name, key));
  }
  [[noreturn]] void fail(const kv::Entry& e, const std::string& msg) const {
    throw ParseError(doc.source, e.line, fmt::format("'{}': {}", e.key, msg));
  }

  double quantity(std::string_view key, Dimension d) const {
    return kv::as_quantity(doc, need(key), d);
  }
  void quantity(std::string_view key, Dimension d, double& out) const {
    if (const auto* e = find(key)) out = kv::as_quantity(doc, *e, d);
  }
  void quantity_or_auto(std::string_view key, Dimension d, std::optional<double>& out) const {
    if (const auto* e = find(key)) out = kv::as_quantity_or_auto(doc, *e, d);
  }
  void number(std::string_view key, double& out) const {
    if (const auto* e = find(key)) out = kv::as_number(doc, *e);
  }
  template <class Int>
  void integer(std::string_view key, Int& out, long min_value) const {
    if (const auto* e = find(key)) {
      const long v = kv::as_integer(doc, *e);
      if (v < min_value) fail(*e, fmt::format("must be at least {}", min_value));
      out = static_cast<Int>(v);
    }
  }
  void word(std::string_view key, std::string& out) const {
    if (const auto* e = find(key)) out = kv::as_string(doc, *e);
  }
  void boolean(std::string_view key, bool& out) const {
    if (const auto* e = find(key)) {
      const auto s = kv::as_string(doc, *e);
      if (s == "true") out = true;
      else if (s == "false") out = false;
      else fail(*e, "expected true or false");
    }
  }
  void positive(std::string_view key, double v) const {
    if (!(v > 0.0)) fail(need(key), "must be positive");
  }
};

Dimension axis_dimension(SweepAxis a) {
  return a == SweepAxis::PumpPower ? Dimension::Power : Dimension::Length;
}

}  // namespace

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::PumpPower: return "pump_power";
    case SweepAxis::Signal: return "signal";
    case SweepAxis::Width: return "width";
  }
  return "?";
}

RunConfig parse_run_config(std::string_view text, std::string source_name) {
  const kv::Document doc = kv::parse(text, std::move(source_name));
  RunConfig c;
  c.source = doc.source;
  c.hash = sha256_hex(text);

  static constexpr std::string_view kSections[] = {"waveguide", "dispersion",  "setup", "analytic",
                                                   "propagation", "sweep", "design"};
  for (const auto& s : doc.sections)
    if (std::find(std::begin(kSections), std::end(kSections), s.name) == std::end(kSections))
      throw ParseError(doc.source, s.line, fmt::format("unknown section [{}]", s.name));

  if (const auto* s = doc.find("waveguide")) {
    kv::reject_unknown(doc, *s, {"width", "height", "length", "core", "top_clad", "substrate",
                                 "polarization", "n2"});
    const Reader r{doc, *s};
    r.quantity("width", Dimension::Length, c.geometry.width);
    r.quantity("height", Dimension::Length, c.geometry.height);
    r.quantity("length", Dimension::Length, c.geometry.length);
    r.word("core", c.geometry.core);
    r.word("top_clad", c.geometry.top_clad);
    r.word("substrate", c.geometry.substrate);
    if (const auto* e = r.find("polarization")) {
      const auto p = kv::as_string(doc, *e);
      if (p == "TE") c.polarization = Polarization::TE;
      else if (p == "TM") c.polarization = Polarization::TM;
      else r.fail(*e, "expected TE or TM");
    }
    r.quantity("n2", Dimension::KerrIndex, c.n2);
    if (r.find("width")) r.positive("width", c.geometry.width);
    if (r.find("height")) r.positive("height", c.geometry.height);
    if (const auto* e = r.find("length"); e && !(c.geometry.length >= 0.0))
      r.fail(*e, "must not be negative");
  }

  if (const auto* s = doc.find("dispersion")) {
    kv::reject_unknown(doc, *s, {"lambda_min", "lambda_max", "points"});
    const Reader r{doc, *s};
    r.quantity("lambda_min", Dimension::Length, c.lambda_min);
    r.quantity("lambda_max", Dimension::Length, c.lambda_max);
    r.integer("points", c.table_points, 64);
    if (!(c.lambda_min > 0.0 && c.lambda_min < c.lambda_max))
      throw ParseError(doc.source, s->line, "[dispersion] needs 0 < lambda_min < lambda_max");
  }

  if (const auto* s = doc.find("setup")) {
    kv::reject_unknown(doc, *s, {"pump1", "pump2", "signal", "power1", "power2", "gamma1",
                                 "gamma2", "signal_power"});
    const Reader r{doc, *s};
    SetupConfig st;
    st.lambda_p1 = r.quantity("pump1", Dimension::Length);
    st.lambda_p2 = r.quantity("pump2", Dimension::Length);
    st.lambda_s = r.quantity("signal", Dimension::Length);
    st.p1 = r.quantity("power1", Dimension::Power);
    st.p2 = r.quantity("power2", Dimension::Power);
    r.quantity_or_auto("gamma1", Dimension::Gamma, st.gamma1);
    r.quantity_or_auto("gamma2", Dimension::Gamma, st.gamma2);
    if (r.find("signal_power")) st.signal_power = r.quantity("signal_power", Dimension::Power);
    r.positive("pump1", st.lambda_p1);
    r.positive("pump2", st.lambda_p2);
    r.positive("signal", st.lambda_s);
    c.setup = st;
  }

  if (const auto* s = doc.find("analytic")) {
    kv::reject_unknown(doc, *s, {"signal_min", "signal_max", "points", "branch"});
    const Reader r{doc, *s};
    AnalyticConfig a;
    a.signal_min = r.quantity("signal_min", Dimension::Length);
    a.signal_max = r.quantity("signal_max", Dimension::Length);
    r.integer("points", a.points, 1);
    if (const auto* e = r.find("branch")) {
      const auto b = kv::as_string(doc, *e);
      if (b == "plus") a.branch = Branch::Plus;
      else if (b == "minus") a.branch = Branch::Minus;
      else r.fail(*e, "expected plus or minus");
    }
    c.analytic = a;
  }

  if (const auto* s = doc.find("propagation")) {
    kv::reject_unknown(doc, *s, {"step", "loss", "margin", "min_steps", "phase_per_step", "gamma",
                                 "spectrum_floor"});
    const Reader r{doc, *s};
    auto& p = c.propagation;
    r.quantity_or_auto("step", Dimension::Length, p.step);
    r.quantity("loss", Dimension::LossDbPerM, p.loss_db_per_m);
    r.number("margin", p.margin);
    r.integer("min_steps", p.min_steps, 1);
    r.quantity("phase_per_step", Dimension::Phase, p.phase_per_step);
    r.quantity_or_auto("gamma", Dimension::Gamma, p.gamma);
    r.quantity("spectrum_floor", Dimension::Power, p.spectrum_floor);
    if (p.step) r.positive("step", *p.step);
    if (const auto* e = r.find("loss"); e && p.loss_db_per_m < 0.0) r.fail(*e, "must not be negative");
    if (const auto* e = r.find("margin"); e && !(p.margin >= 1.1)) r.fail(*e, "must be at least 1.1");
    if (const auto* e = r.find("phase_per_step");
        e && !(p.phase_per_step > 0.0 && p.phase_per_step < kMaxNonlinearPhasePerStep))
      r.fail(*e, fmt::format("must lie in (0, {}) rad", kMaxNonlinearPhasePerStep));
  }

  if (const auto* s = doc.find("sweep")) {
    kv::reject_unknown(doc, *s, {"axis", "start", "stop", "points"});
    const Reader r{doc, *s};
    SweepConfig sw;
    const auto& ae = r.need("axis");
    const auto axis = kv::as_string(doc, ae);
    if (axis == "pump_power") sw.axis = SweepAxis::PumpPower;
    else if (axis == "signal") sw.axis = SweepAxis::Signal;
    else if (axis == "width") sw.axis = SweepAxis::Width;
    else r.fail(ae, "expected pump_power, signal or width");
    sw.start = r.quantity("start", axis_dimension(sw.axis));
    sw.stop = r.quantity("stop", axis_dimension(sw.axis));
    r.integer("points", sw.points, 1);
    if (sw.axis != SweepAxis::PumpPower) {
      r.positive("start", sw.start);
      r.positive("stop", sw.stop);
    } else if (sw.start < 0.0 || sw.stop < 0.0) {
      throw ParseError(doc.source, s->line, "[sweep] pump powers must not be negative");
    }
    c.sweep = sw;
  }

  if (const auto* s = doc.find("design")) {
    kv::reject_unknown(doc, *s, {"emitter", "lambda_sps", "telecom", "pump_offset", "eta_target",
                                 "width_min", "width_max", "ssfm", "refine", "power_cap"});
    const Reader r{doc, *s};
    DesignConfig d;
    d.target.height = c.geometry.height;
    if (doc.find("waveguide") && doc.find("waveguide")->find("length"))
      d.target.length = c.geometry.length;
    const auto* em = r.find("emitter");
    const auto* ls = r.find("lambda_sps");
    if (em && ls) r.fail(*ls, "give either emitter or lambda_sps, not both");
    if (em) {
      d.emitter = kv::as_string(doc, *em);
      const auto* preset = find_emitter(d.emitter);
      if (!preset) {
        std::string keys;
        for (const auto& p : emitter_presets()) keys += (keys.empty() ? "" : ", ") + std::string(p.key);
        r.fail(*em, fmt::format("unknown emitter '{}' (presets: {})", d.emitter, keys));
      }
      d.target.lambda_sps = preset->lambda;
    } else if (ls) {
      d.target.lambda_sps = kv::as_quantity(doc, *ls, Dimension::Length);
    } else {
      throw ParseError(doc.source, s->line, "[design] needs emitter or lambda_sps");
    }
    r.quantity("telecom", Dimension::Length, d.target.lambda_telecom);
    r.quantity("pump_offset", Dimension::Length, d.target.pump_offset);
    r.number("eta_target", d.target.eta_target);
    r.quantity("width_min", Dimension::Length, d.widths.min);
    r.quantity("width_max", Dimension::Length, d.widths.max);
    r.boolean("ssfm", d.run_ssfm);
    r.boolean("refine", d.refine);
    r.quantity("power_cap", Dimension::Power, d.power_cap);
    try {
      d.target.validate();
    } catch (const DomainError& e) {
      throw ParseError(doc.source, s->line, fmt::format("[design] {}", e.what()));
    }
    c.design = d;
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

TableRequest RunConfig::table_request() const {
  return TableRequest{lambda_min, lambda_max, table_points, polarization, n2};
}

ExperimentPolicy RunConfig::experiment_policy() const {
  ExperimentPolicy p;
  p.grid.margin_factor = propagation.margin;
  p.target_phase_per_step = propagation.phase_per_step;
  p.min_steps = propagation.min_steps;
  p.step = propagation.step.value_or(0.0);
  p.gamma_carrier = propagation.gamma;
  p.loss_db_per_m = propagation.loss_db_per_m;
  p.spectrum_floor_w = propagation.spectrum_floor;
  return p;
}

DesignOptions RunConfig::design_options(Execution exec) const {
  DesignOptions o;
  o.base = geometry;
  o.polarization = polarization;
  o.n2 = n2;
  o.table_lambda_min = lambda_min;
  o.table_lambda_max = lambda_max;
  o.table_points = table_points;
  o.experiment = experiment_policy();
  o.exec = exec;
  if (design) {
    o.widths = design->widths;
    o.run_ssfm = design->run_ssfm;
    o.refine_phase_matching = design->refine;
    o.power_cap = design->power_cap;
  }
  return o;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["source"] = c.source;
  j["config_hash"] = c.hash;
  j["waveguide"] = {{"width_m", c.geometry.width},
                    {"height_m", c.geometry.height},
                    {"length_m", c.geometry.length},
                    {"core", c.geometry.core},
                    {"top_clad", c.geometry.top_clad},
                    {"substrate", c.geometry.substrate},
                    {"polarization", c.polarization == Polarization::TE ? "TE" : "TM"},
                    {"n2_m2_W", c.n2}};
  j["dispersion"] = {{"lambda_min_m", c.lambda_min},
                     {"lambda_max_m", c.lambda_max},
                     {"points", c.table_points}};
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json("auto");
  };
  if (c.setup) {
    const auto& s = *c.setup;
    j["setup"] = {{"pump1_m", s.lambda_p1},  {"pump2_m", s.lambda_p2}, {"signal_m", s.lambda_s},
                  {"power1_w", s.p1},        {"power2_w", s.p2},       {"gamma1_W_m", opt(s.gamma1)},
                  {"gamma2_W_m", opt(s.gamma2)}, {"signal_power_w", opt(s.signal_power)}};
  }
  if (c.analytic) {
    const auto& a = *c.analytic;
    j["analytic"] = {{"signal_min_m", a.signal_min},
                     {"signal_max_m", a.signal_max},
                     {"points", a.points},
                     {"branch", to_string(a.branch)}};
  }
  const auto& p = c.propagation;
  j["propagation"] = {{"step_m", opt(p.step)},
                      {"loss_db_per_m", p.loss_db_per_m},
                      {"margin", p.margin},
                      {"min_steps", p.min_steps},
                      {"phase_per_step_rad", p.phase_per_step},
                      {"gamma_W_m", opt(p.gamma)},
                      {"spectrum_floor_w", p.spectrum_floor}};
  if (c.sweep)
    j["sweep"] = {{"axis", to_string(c.sweep->axis)},
                  {"start", c.sweep->start},
                  {"stop", c.sweep->stop},
                  {"points", c.sweep->points}};
  if (c.design) {
    const auto& d = *c.design;
    j["design"] = {{"emitter", d.emitter},
                   {"target", to_json(d.target)},
                   {"width_min_m", d.widths.min},
                   {"width_max_m", d.widths.max},
                   {"ssfm", d.run_ssfm},
                   {"refine", d.refine},
                   {"power_cap_w", d.power_cap}};
  }
  return j;
}

std::shared_ptr<const DispersionProfile> build_profile(const MaterialDb& db, const RunConfig& c,
                                                       Execution exec) {
  c.geometry.validate(db);
  return std::make_shared<const DispersionProfile>(
      propagation_constant_table(db, c.geometry, c.table_request(), exec));
}

BraggScatteringSetup build_setup(const MaterialDb& db, const RunConfig& c,
                                 std::shared_ptr<const DispersionProfile> profile) {
  if (!c.setup) throw ConfigError(fmt::format("{}: this command needs a [setup] section", c.source));
  const auto& st = *c.setup;
  const auto gamma = [&](const std::optional<double>& g, double lam) {
    if (g) return *g;
    const double aeff = effective_area(db, c.geometry, lam, c.polarization);
    return nonlinear_coefficient(aeff, c.n2, lam);
  };
  BraggScatteringSetup s;
  s.omega_p1 = omega_from_lambda(st.lambda_p1);
  s.omega_p2 = omega_from_lambda(st.lambda_p2);
  s.omega_s = omega_from_lambda(st.lambda_s);
  s.p1 = st.p1;
  s.p2 = st.p2;
  s.gamma1 = gamma(st.gamma1, st.lambda_p1);
  s.gamma2 = gamma(st.gamma2, st.lambda_p2);
  s.profile = std::move(profile);
  s.length = c.geometry.length;
  s.signal_power = st.signal_power.value_or(0.0);
  return s;
}

}  // namespace fwmbs
