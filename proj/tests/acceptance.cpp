// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fwmbs/cmt.hpp"
#include "fwmbs/design.hpp"
#include "fwmbs/errors.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/ssfm.hpp"
#include "fwmbs/units.hpp"

using namespace fwmbs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const MaterialDb& db() {
  static const MaterialDb d = load_material_db(FWMBS_DEFAULT_MATERIALS);
  return d;
}

WaveguideGeometry ridge_geometry() { return WaveguideGeometry{}; }  // 550 x 1200 nm, air top

std::shared_ptr<const DispersionProfile> table_for(const WaveguideGeometry& g) {
  return std::make_shared<DispersionProfile>(
      propagation_constant_table(db(), g, TableRequest{500e-9, 2400e-9, 512}));
}

double gamma_at(const WaveguideGeometry& g, double lambda) {
  return nonlinear_coefficient(effective_area(db(), g, lambda, Polarization::TE), kDefaultN2, lambda);
}

double to_db(double x) { return 10.0 * std::log10(x); }

// -- 1 -----------------------------------------------------------------------
Outcome eq1_exactness() {
  BraggScatteringSetup s;
  s.omega_p1 = omega_from_lambda(974e-9);
  s.omega_p2 = omega_from_lambda(1550e-9);
  s.omega_s = omega_from_lambda(980e-9);
  s.gamma1 = s.gamma2 = 6.0;
  s.p1 = s.p2 = 9.0;
  // beta linear in omega: zero linear mismatch, and equal gamma P cancels the Kerr term
  std::vector<double> om, be;
  for (int i = 0; i < 64; ++i) {
    om.push_back(1.0e15 + i * 2e13);
    be.push_back(5e-9 * om.back());
  }
  s.profile = std::make_shared<DispersionProfile>(om, be);
  s.length = M_PI / (2.0 * 2.0 * std::sqrt(s.gamma1 * s.gamma2 * s.p1 * s.p2));
  const auto full = conversion_efficiency(s, Branch::Plus, s.length);
  const double err1 = std::abs(full.eta - 1.0);

  s.p1 = 13e-3;
  s.p2 = 43e-3;
  s.length = 18e-3;
  const auto low = conversion_efficiency(s, Branch::Plus, s.length);
  const double rel = std::abs(low.eta - 2.6e-5) / 2.6e-5;
  return {err1 <= 1e-12 && rel <= 0.01,
          fmt::format("eta(pi/2g) = 1 - {:.1e}; eta(18 mm, 13/43 mW) = {:.4e} (2.6e-5 +/- 1 %: "
                      "{:.2f} %)",
                      err1, low.eta, 100 * rel)};
}

// -- 2, 3 ------------------------------------------------------------------
Outcome zdw_reproduction() {
  const auto prof = table_for(ridge_geometry());
  const auto z = zero_dispersion_wavelengths(*prof);
  std::string list;
  bool in_band = false;
  for (double l : z) {
    list += fmt::format("{}{:.1f}", list.empty() ? "" : ", ", l * 1e9);
    in_band |= l >= 1100e-9 && l <= 1300e-9;
  }
  return {in_band, fmt::format("ZDWs of the 550 x 1200 nm guide: [{}] nm, window [1100, 1300] nm",
                               list)};
}

Outcome gamma_reproduction() {
  const double a = effective_area(db(), ridge_geometry(), 1550e-9, Polarization::TE);
  const double g = nonlinear_coefficient(a, 2.5e-19, 1550e-9);
  return {g >= 3.0 && g <= 12.0,
          fmt::format("gamma(1550 nm) = {:.3f} /W/m with A_eff = {:.4f} um^2, window [3, 12]", g,
                      a * 1e12)};
}

// -- 4, 5 ------------------------------------------------------------------
struct OracleRuns {
  int configs = 0;
  double worst_db = 0.0;
  double max_eta = 0.0;
  double worst_conservation = 0.0;
  bool pumps_normal = false;
  std::string note;
};

// Wide guide whose dispersion is normal at both pumps.
WaveguideGeometry normal_guide() {
  WaveguideGeometry g;
  g.width = 2300e-9;
  return g;
}

const OracleRuns& oracle_runs() {
  static const OracleRuns r = [] {
    OracleRuns out;
    const auto g = normal_guide();
    const auto prof = table_for(g);
    const double d1 = prof->dispersion_ps_nm_km(974e-9), d2 = prof->dispersion_ps_nm_km(1550e-9);
    out.pumps_normal = d1 < 0 && d2 < 0;
    const double g1 = gamma_at(g, 974e-9), g2 = gamma_at(g, 1550e-9);
    out.note = fmt::format("width 2300 nm, D = {:.1f} / {:.1f} ps/nm/km, gamma = {:.3f} / {:.3f}",
                           d1, d2, g1, g2);
    const double detunings[] = {0.2e-9, 0.5e-9, 1.0e-9, 1.5e-9, 2.0e-9};
    const std::pair<double, double> powers[] = {{5e-3, 5e-3}, {13e-3, 43e-3}, {50e-3, 20e-3},
                                                {30e-3, 50e-3}};
    for (double det : detunings)
      for (auto [p1, p2] : powers) {
        BraggScatteringSetup s;
        s.profile = prof;
        s.omega_p1 = omega_from_lambda(974e-9);
        s.omega_p2 = omega_from_lambda(1550e-9);
        s.omega_s = omega_from_lambda(974e-9 + det);
        s.p1 = p1;
        s.p2 = p2;
        s.gamma1 = g1;
        s.gamma2 = g2;
        s.length = 18e-3;
        ExperimentPolicy pol;
        // scalar-gamma propagation: use the geometric mean that the coupled
        // equations see in their coupling term
        pol.gamma_carrier = std::sqrt(g1 * g2);
        const auto res = bs_conversion_experiment(s, pol);
        for (Branch b : {Branch::Plus, Branch::Minus}) {
          const double cmt = conversion_efficiency(s, b, s.length).eta;
          const double ssfm = b == Branch::Plus ? res.eta_plus : res.eta_minus;
          out.worst_db = std::max(out.worst_db, std::abs(to_db(ssfm) - to_db(cmt)));
          out.max_eta = std::max({out.max_eta, cmt, ssfm});
        }
        out.worst_conservation = std::max(out.worst_conservation, res.conserved_power_error);
        ++out.configs;
      }
    return out;
  }();
  return r;
}

Outcome oracle_agreement() {
  const auto& r = oracle_runs();
  const bool ok = r.configs >= 20 && r.pumps_normal && r.max_eta <= 1e-3 && r.worst_db <= 1.0;
  return {ok, fmt::format("{} configs x 2 idlers, worst |dB| = {:.3f}, max eta = {:.1f} dB; {}",
                          r.configs, r.worst_db, to_db(r.max_eta), r.note)};
}

Outcome conservation() {
  const auto& r = oracle_runs();
  // Step halving at a power where the Kerr terms matter.
  const auto g = normal_guide();
  BraggScatteringSetup s;
  s.profile = table_for(g);
  s.omega_p1 = omega_from_lambda(974e-9);
  s.omega_p2 = omega_from_lambda(1550e-9);
  s.omega_s = omega_from_lambda(975e-9);
  s.p1 = s.p2 = 2.0;
  s.gamma1 = gamma_at(g, 974e-9);
  s.gamma2 = gamma_at(g, 1550e-9);
  s.length = 18e-3;
  ExperimentPolicy pol;
  pol.gamma_carrier = std::sqrt(s.gamma1 * s.gamma2);
  const auto a = bs_conversion_experiment(s, pol);
  pol.step = a.log.step / 2;
  const auto b = bs_conversion_experiment(s, pol);
  const double change = std::abs(b.eta_plus - a.eta_plus) / a.eta_plus;
  const double worst = std::max({r.worst_conservation, a.conserved_power_error, b.conserved_power_error});
  return {worst <= 1e-6 && change < 0.02,
          fmt::format("max relative power drift {:.2e} over {} runs; step {:.3f} -> {:.3f} mm "
                      "changes eta+ ({:.3e}) by {:.3f} %",
                      worst, r.configs + 2, a.log.step * 1e3, b.log.step * 1e3, a.eta_plus,
                      100 * change)};
}

// -- 6 -----------------------------------------------------------------------
// 974 + 1550 nm pumps on the 550 x 1200 nm guide. Near the lobe the mismatch
// is linear in the signal detuning, which is what the sinc^2 scaling needs.
Outcome bandwidth_scaling() {
  const auto geo = ridge_geometry();
  BraggScatteringSetup s;
  s.profile = table_for(geo);
  s.omega_p1 = omega_from_lambda(974e-9);
  s.omega_p2 = omega_from_lambda(1550e-9);
  s.omega_s = omega_from_lambda(980e-9);
  s.p1 = 13e-3;
  s.p2 = 43e-3;
  s.gamma1 = gamma_at(geo, 974e-9);
  s.gamma2 = gamma_at(geo, 1550e-9);
  s.length = 18e-3;
  const double span = 2e13;
  const auto n1 = first_null_width(s, s.omega_p1 - span, s.omega_p1 + span, Branch::Plus, 4001);
  BraggScatteringSetup s2 = s;
  s2.length = 2 * s.length;
  const auto n2 = first_null_width(s2, s.omega_p1 - span, s.omega_p1 + span, Branch::Plus, 4001);
  const double ratio = n2.width() / n1.width();

  // sidelobes: local maxima outside the main lobe
  const double lo = n1.omega_peak - 2.5 * n1.width(), hi = n1.omega_peak + 2.5 * n1.width();
  const auto curve = phase_matching_curve(s, lo, hi, 4001, Branch::Plus);
  double peak = 0.0, side = 0.0;
  int lobes = 0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const auto& c = curve[i];
    peak = std::max(peak, c.eta);
    const bool local = c.eta > curve[i - 1].eta && c.eta >= curve[i + 1].eta;
    if (local && (c.omega_s < n1.omega_left || c.omega_s > n1.omega_right)) {
      side = std::max(side, c.eta);
      ++lobes;
    }
  }
  const auto nm = [](const NullWidth& n) {
    return (lambda_from_omega(n.omega_left) - lambda_from_omega(n.omega_right)) * 1e9;
  };
  const bool ok = std::abs(ratio - 0.5) <= 0.025 && lobes >= 2 && side < peak;
  return {ok, fmt::format("first-null width {:.4f} nm at 18 mm, {:.4f} nm at 36 mm, ratio {:.5f}; "
                          "{} sidelobes, highest {:.3f} of the peak",
                          nm(n1), nm(n2), ratio, lobes, side / peak)};
}

// -- 7 -----------------------------------------------------------------------
Outcome tuning_slopes() {
  const double w1 = omega_from_lambda(974e-9), w2 = omega_from_lambda(1550e-9);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double ws = omega_from_lambda(960e-9 + i * 0.1e-9);
    const double dw = 1e12;
    const auto a = idler_frequencies(w1, w2, ws), b = idler_frequencies(w1, w2, ws + dw);
    worst = std::max(worst, std::abs((b.plus - a.plus) / dw - 1.0));
    worst = std::max(worst, std::abs((b.minus - a.minus) / dw + 1.0));
  }
  return {worst <= 1e-12,
          fmt::format("d omega_i / d omega_s = +1 / -1 with worst deviation {:.2e}", worst)};
}

// -- 8 -----------------------------------------------------------------------
Outcome design_780() {
  const auto r = design_for_sps(db(), DesignTarget{}, DesignOptions{});
  const bool ok = r.pump_power_ssfm && *r.pump_power_ssfm <= 13.5 && r.eta_ssfm >= 0.25;
  return {ok, fmt::format("width {:.1f} nm, split-step eta = {:.4f} at {:.3f} W per pump "
                          "(analytic {:.3f} W, {} runs)",
                          r.width * 1e9, r.eta_ssfm, r.pump_power_ssfm.value_or(NAN),
                          r.pump_power_analytic, r.ssfm_runs)};
}

// -- 9 -----------------------------------------------------------------------
Outcome narrowband() {
  const double ls = 980e-9, l1 = 1545e-9, l2 = 1555e-9;
  const auto id = narrowband_idler(omega_from_lambda(ls), omega_from_lambda(l1), omega_from_lambda(l2));
  const double off_plus = std::abs(lambda_from_omega(id.plus) - ls) * 1e9;
  const double off_minus = std::abs(lambda_from_omega(id.minus) - ls) * 1e9;
  const double dnu = kSpeedOfLight / l1 - kSpeedOfLight / l2;
  const double first_order = ls * ls * dnu / kSpeedOfLight * 1e9;
  const auto tenth = [](double x) { return std::round(x * 10.0) / 10.0; };
  bool ok = true;
  for (double off : {off_plus, off_minus}) {
    ok &= std::abs(off - first_order) / first_order < 0.01;
    ok &= tenth(off) >= 4.0 && tenth(off) <= 5.0;
  }
  return {ok, fmt::format("pumps 1545/1555 nm, 980 nm signal: idlers {:.3f} and {:.3f} nm away "
                          "(first order {:.3f} nm)",
                          off_plus, off_minus, first_order)};
}

// -- 10 ----------------------------------------------------------------------
struct Trace {
  std::vector<double> z, ratio;  // seeded sideband power over its input value
};

Trace seeded_trace(const std::shared_ptr<const DispersionProfile>& prof, double w0, double P,
                   double gamma, double offset, double segment, int segments) {
  const std::vector<Tone> tones{{w0, P, 0.0}, {w0 + offset, 1e-10, 0.0}, {w0 - offset, 0.0, 0.0}};
  GridPolicy gp;
  gp.margin_factor = 3.0;
  const auto grid = build_grid(tones, gp);
  auto field = inject_cw_tones(grid.grid, tones);
  const std::size_t k = grid.tones[1].bin;
  const double p0 = field.spectral_power()[k];
  const double step = segment / std::ceil(segment * gamma * P / 0.01);
  Trace t;
  for (int i = 1; i <= segments; ++i) {
    field = propagate(field, PropagationSpec{prof, gamma, segment, step, 0.0}).field;
    t.z.push_back(i * segment);
    t.ratio.push_back(field.spectral_power()[k] / p0);
  }
  return t;
}

// Least-squares slope of ln(power) / 2, i.e. a field growth rate.
double field_growth_rate(const Trace& t, std::size_t first) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = first; i < t.z.size(); ++i, ++n) {
    const double y = std::log(t.ratio[i]);
    sx += t.z[i];
    sy += y;
    sxx += t.z[i] * t.z[i];
    sxy += t.z[i] * y;
  }
  return 0.5 * (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome mi_screening() {
  const auto geo = ridge_geometry();
  const auto prof = table_for(geo);
  const double P = 1.0;

  const double wa = omega_from_lambda(1550e-9);
  const double ga = gamma_at(geo, 1550e-9);
  const auto mia = modulation_instability_check(*prof, wa, P, ga);
  const auto grow = seeded_trace(prof, wa, P, ga, mia.peak_detuning, 0.25, 12);
  const double fitted = field_growth_rate(grow, grow.z.size() / 2);
  const double err = std::abs(fitted - mia.peak_gain) / mia.peak_gain;

  // Normal dispersion: the sideband only beats with its conjugate. Linearised
  // sideband equations bound the power ratio by 1 + (gP)^2 / ((k/2)^2 - (gP)^2)
  // with k = beta2 W^2 + 2 gP.
  const double wn = omega_from_lambda(780e-9);
  const double gn = gamma_at(geo, 780e-9);
  const double offset = mia.peak_detuning;
  const auto min = modulation_instability_check(*prof, wn, P, gn);
  const auto flat = seeded_trace(prof, wn, P, gn, offset, 0.05, 60);
  const double half_k = 0.5 * (min.beta2 * offset * offset + 2 * gn * P);
  const double bound = 1.0 + std::pow(gn * P, 2) / (half_k * half_k - std::pow(gn * P, 2));
  const double peak = *std::max_element(flat.ratio.begin(), flat.ratio.end());
  const double drift = field_growth_rate(flat, 0);

  const bool ok = mia.regime == DispersionRegime::Anomalous && err <= 0.1 &&
                  min.regime == DispersionRegime::Normal && std::abs(drift) < 0.1 * gn * P &&
                  peak <= 1.05 * bound;
  return {ok, fmt::format("1550 nm pump (anomalous): fitted gain {:.4f} /m vs analytic {:.4f} /m "
                          "({:.2f} %); 780 nm pump (normal): growth rate {:+.4f} /m, sideband "
                          "peaks at {:.3f}x (bounded oscillation, limit {:.3f}x)",
                          fitted, mia.peak_gain, 100 * err, drift, peak, bound)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 conversion-efficiency closed form", eq1_exactness},
      {"2 zero-dispersion wavelength of the 550x1200 nm guide", zdw_reproduction},
      {"3 nonlinear coefficient at 1550 nm", gamma_reproduction},
      {"4 split-step vs coupled-mode, undepleted", oracle_agreement},
      {"5 power conservation and step halving", conservation},
      {"6 first-null width halves when L doubles", bandwidth_scaling},
      {"7 idler tuning slopes", tuning_slopes},
      {"8 780 <-> 1550 nm design pipeline", design_780},
      {"9 narrowband idler offset", narrowband},
      {"10 modulation-instability screening", mi_screening},
  };
  // optional arguments pick criteria by number
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[k - 1] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto& c = criteria[i];
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    fmt::print("{} criterion {}: {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail, secs);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
