#include "fwmbs/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "fwmbs/cmt.hpp"
#include "fwmbs/errors.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

constexpr std::array<EmitterPreset, 4> kPresets{{
    {"nv637", "NV centre in diamond", 637e-9},
    {"rb780", "rubidium D2", 780e-9},
    {"cs852", "caesium D2", 852e-9},
    {"qd980", "InAs quantum dot", 980e-9},
}};

constexpr double kNearZeroD = 5.0;  // ps/(nm km)
constexpr int kRefineScanPoints = 31;

WaveguideGeometry geometry_at(const DesignOptions& opt, double width, double height) {
  WaveguideGeometry g = opt.base;
  g.width = width;
  g.height = height;
  return g;
}

// Signed stand-in for the ZDW so that root-free widths still order
// correctly: all-normal tables lie above any target, all-anomalous below.
// The first zero moves to longer wavelengths as the guide widens until the
// anomalous window closes, so a root-free all-normal table sits above every
// target.
double zdw_key(const ZdwProbe& p) {
  if (p.zdw) return *p.zdw;
  return p.all_normal ? INFINITY : -INFINITY;
}

std::string describe(const ZdwProbe& p) {
  if (p.zdw) return fmt::format("{:.1f} nm", *p.zdw * 1e9);
  return p.all_normal ? "none (all normal)" : "none (all anomalous)";
}

struct Pumps {
  double w1, w2, ws, wi;
};

Pumps pumps_for(const DesignTarget& t) {
  Pumps p;
  p.w1 = omega_from_lambda(t.lambda_sps - t.pump_offset);
  p.w2 = omega_from_lambda(t.lambda_telecom);
  p.ws = omega_from_lambda(t.lambda_sps);
  p.wi = idler_frequency(p.w1, p.w2, p.ws, Branch::Plus);
  return p;
}

// Linear mismatch of the exchange idler straight from the mode solver.
double kappa_linear_at(const MaterialDb& db, const WaveguideGeometry& g, const Pumps& p,
                       Polarization pol) {
  const auto beta = [&](double w) {
    const double lam = lambda_from_omega(w);
    return kTwoPi * effective_index(db, g, lam, pol) / lam;
  };
  return (beta(p.w1) - beta(p.ws)) + (beta(p.wi) - beta(p.w2));
}

double gamma_at(const MaterialDb& db, const WaveguideGeometry& g, double lam,
                const DesignOptions& opt) {
  return nonlinear_coefficient(effective_area(db, g, lam, opt.polarization), opt.n2, lam);
}

}  // namespace

void DesignTarget::validate() const {
  if (!(lambda_sps > 0.0) || !(lambda_telecom > 0.0))
    throw DomainError("design wavelengths must be positive");
  if (!(lambda_sps < lambda_telecom))
    throw DomainError(fmt::format("emitter wavelength {:.1f} nm must lie below {:.1f} nm",
                                  lambda_sps * 1e9, lambda_telecom * 1e9));
  if (!(height > 0.0) || !(length > 0.0)) throw DomainError("height and length must be positive");
  if (!(eta_target > 0.0 && eta_target <= 1.0))
    throw DomainError(fmt::format("target efficiency {} outside (0, 1]", eta_target));
  if (!(pump_offset > 0.0) || pump_offset >= lambda_sps)
    throw DomainError("pump offset must be positive and below the emitter wavelength");
}

std::span<const EmitterPreset> emitter_presets() { return kPresets; }

const EmitterPreset* find_emitter(std::string_view key) {
  for (const auto& p : kPresets)
    if (p.key == key) return &p;
  return nullptr;
}

namespace {

bool guided(const MaterialDb& db, const WaveguideGeometry& g, double lambda, Polarization pol) {
  try {
    effective_index(db, g, lambda, pol);
    return true;
  } catch (const NoGuidedModeError&) {
    return false;
  }
}

// Narrow guides lose the mode before the end of the table. Only the first
// zero matters here, so stop the table a little short of the cutoff.
double guided_lambda_max(const MaterialDb& db, const WaveguideGeometry& g, const DesignOptions& opt) {
  if (guided(db, g, opt.table_lambda_max, opt.polarization)) return opt.table_lambda_max;
  double lo = opt.table_lambda_min, hi = opt.table_lambda_max;
  if (!guided(db, g, lo, opt.polarization))
    throw NoGuidedModeError(fmt::format("{:.0f} x {:.0f} nm waveguide guides nothing above {:.0f} nm",
                                        g.height * 1e9, g.width * 1e9, lo * 1e9));
  while (hi - lo > 0.1e-9) {
    const double mid = 0.5 * (lo + hi);
    (guided(db, g, mid, opt.polarization) ? lo : hi) = mid;
  }
  const double top = 0.98 * lo;
  if (top < opt.table_lambda_min + 0.25 * (opt.table_lambda_max - opt.table_lambda_min))
    throw NoGuidedModeError(fmt::format("{:.0f} x {:.0f} nm waveguide is cut off at {:.1f} nm",
                                        g.height * 1e9, g.width * 1e9, lo * 1e9));
  return top;
}

}  // namespace

ZdwProbe probe_zdw(const MaterialDb& db, const WaveguideGeometry& g, const DesignOptions& opt) {
  TableRequest req{opt.table_lambda_min, guided_lambda_max(db, g, opt), opt.table_points,
                   opt.polarization, opt.n2};
  const DispersionProfile prof = propagation_constant_table(db, g, req, opt.exec);
  ZdwProbe out;
  const auto roots = zero_dispersion_wavelengths(prof);
  if (!roots.empty()) {
    out.zdw = roots.front();
  } else {
    const auto b2 = prof.beta2();
    out.all_normal = b2[b2.size() / 2] > 0.0;
  }
  return out;
}

double find_width_for_zdw(const MaterialDb& db, double target, double height,
                          const DesignOptions& opt) {
  if (!(target > 0.0)) throw DomainError("target ZDW must be positive");
  if (!(opt.widths.min > 0.0 && opt.widths.min < opt.widths.max))
    throw DomainError("width range must be positive and increasing");

  double lo = opt.widths.min, hi = opt.widths.max;
  const ZdwProbe p_lo = probe_zdw(db, geometry_at(opt, lo, height), opt);
  const ZdwProbe p_hi = probe_zdw(db, geometry_at(opt, hi, height), opt);
  double f_lo = zdw_key(p_lo) - target;
  const double f_hi = zdw_key(p_hi) - target;
  if (p_lo.zdw && std::abs(f_lo) < opt.zdw_tolerance) return lo;
  if (p_hi.zdw && std::abs(f_hi) < opt.zdw_tolerance) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw UnreachableTargetError(fmt::format(
        "ZDW {:.1f} nm unreachable at height {:.0f} nm: width {:.0f} nm gives {}, width {:.0f} "
        "nm gives {}",
        target * 1e9, height * 1e9, lo * 1e9, describe(p_lo), hi * 1e9, describe(p_hi)));

  double best_zdw = p_lo.zdw.value_or(0.0);
  bool hi_has_root = p_hi.zdw.has_value();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const ZdwProbe p = probe_zdw(db, geometry_at(opt, mid, height), opt);
    const double f = zdw_key(p) - target;
    if (p.zdw && std::abs(f) < opt.zdw_tolerance) return mid;
    if ((f > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f;
      if (p.zdw) best_zdw = *p.zdw;
    } else {
      hi = mid;
      hi_has_root = p.zdw.has_value();
    }
    if (hi - lo < 1e-13) break;
  }
  // Converged onto the edge of the anomalous window rather than a root.
  if (!hi_has_root)
    throw UnreachableTargetError(fmt::format(
        "ZDW {:.1f} nm unreachable at height {:.0f} nm: the anomalous window closes near width "
        "{:.1f} nm, where the first ZDW is at most {:.1f} nm",
        target * 1e9, height * 1e9, lo * 1e9, best_zdw * 1e9));
  throw NumericalError(fmt::format("width bisection for ZDW {:.1f} nm did not converge near {:.3f} nm",
                                   target * 1e9, 0.5 * (lo + hi) * 1e9));
}

double required_pump_power(double gamma1, double gamma2, double length, double eta_target) {
  if (!(eta_target > 0.0 && eta_target <= 1.0))
    throw DomainError(fmt::format("target efficiency {} outside (0, 1]", eta_target));
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !(length > 0.0))
    throw DomainError("gamma and length must be positive");
  return std::asin(std::sqrt(eta_target)) / (2.0 * std::sqrt(gamma1 * gamma2) * length);
}

DesignReport design_for_sps(const MaterialDb& db, const DesignTarget& target,
                            const DesignOptions& opt) {
  target.validate();
  DesignReport r;
  r.target = target;
  r.zdw_target = target.zdw_target();
  r.width_zdw_rule = find_width_for_zdw(db, r.zdw_target, target.height, opt);
  r.width = r.width_zdw_rule;

  const Pumps pumps = pumps_for(target);
  r.lambda_p1 = lambda_from_omega(pumps.w1);
  r.lambda_p2 = lambda_from_omega(pumps.w2);
  r.lambda_signal = lambda_from_omega(pumps.ws);
  r.lambda_idler = lambda_from_omega(pumps.wi);

  if (opt.refine_phase_matching) {
    const auto kappa = [&](double w) {
      return kappa_linear_at(db, geometry_at(opt, w, target.height), pumps, opt.polarization);
    };
    // Scan for sign changes and take the bracket nearest the ZDW-rule width.
    std::vector<double> ws(kRefineScanPoints), ks(kRefineScanPoints);
    for (int i = 0; i < kRefineScanPoints; ++i) {
      ws[i] = opt.widths.min + (opt.widths.max - opt.widths.min) * i / (kRefineScanPoints - 1);
      ks[i] = kappa(ws[i]);
    }
    int best = -1;
    double best_dist = INFINITY;
    for (int i = 0; i + 1 < kRefineScanPoints; ++i) {
      if ((ks[i] > 0.0) == (ks[i + 1] > 0.0)) continue;
      const double d = std::abs(0.5 * (ws[i] + ws[i + 1]) - r.width_zdw_rule);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    if (best < 0) {
      r.warnings.push_back(
          "phase-matching: no width in range nulls the linear mismatch; keeping the ZDW-rule "
          "width");
    } else {
      double lo = ws[best], hi = ws[best + 1], k_lo = ks[best];
      while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        const double k = kappa(mid);
        if ((k > 0.0) == (k_lo > 0.0)) {
          lo = mid;
          k_lo = k;
        } else {
          hi = mid;
        }
      }
      r.width = 0.5 * (lo + hi);
    }
  }

  const WaveguideGeometry g = geometry_at(opt, r.width, target.height);
  r.lambda_zdw = probe_zdw(db, g, opt).zdw;
  r.kappa_linear = kappa_linear_at(db, g, pumps, opt.polarization);

  TableRequest req{opt.table_lambda_min, opt.table_lambda_max, opt.table_points,
                   opt.polarization, opt.n2};
  auto profile = std::make_shared<DispersionProfile>(
      propagation_constant_table(db, g, req, opt.exec));
  r.d_at_sps = profile->dispersion_ps_nm_km(r.lambda_p1);
  r.d_at_telecom = profile->dispersion_ps_nm_km(r.lambda_p2);
  r.gamma_p1 = gamma_at(db, g, r.lambda_p1, opt);
  r.gamma_p2 = gamma_at(db, g, r.lambda_p2, opt);

  for (auto [lam, d] : {std::pair{r.lambda_p1, r.d_at_sps}, std::pair{r.lambda_p2, r.d_at_telecom}}) {
    if (d > 0.0)
      r.warnings.push_back(fmt::format(
          "{}: pump at {:.1f} nm is in anomalous dispersion (D = {:+.2f} ps/nm/km)",
          kWarnModulationInstability, lam * 1e9, d));
    if (std::abs(d) < kNearZeroD)
      r.warnings.push_back(fmt::format(
          "{}: pump at {:.1f} nm has |D| = {:.2f} ps/nm/km; its regime is sensitive to "
          "fabrication",
          kWarnNearZeroDispersion, lam * 1e9, std::abs(d)));
  }

  r.pump_power_analytic = required_pump_power(r.gamma_p1, r.gamma_p2, target.length,
                                              target.eta_target);
  if (!opt.run_ssfm) return r;

  BraggScatteringSetup setup;
  setup.omega_p1 = pumps.w1;
  setup.omega_p2 = pumps.w2;
  setup.omega_s = pumps.ws;
  setup.gamma1 = r.gamma_p1;
  setup.gamma2 = r.gamma_p2;
  setup.profile = profile;
  setup.length = target.length;

  const auto eta = [&](double p) {
    setup.p1 = setup.p2 = p;
    ++r.ssfm_runs;
    return bs_conversion_experiment(setup, opt.experiment, opt.exec).eta_plus;
  };
  const double goal = target.eta_target;
  const double step = opt.power_step;

  double lo = 0.0, hi = 0.0, eta_hi = 0.0;
  double p = std::min(std::max(r.pump_power_analytic, 1e-3), opt.power_cap);
  double e = eta(p);
  if (e >= goal) {
    hi = p;
    eta_hi = e;
    for (;;) {
      lo = hi / step;
      const double el = eta(lo);
      if (el < goal) break;
      hi = lo;
      eta_hi = el;
      if (hi < 1e-6) break;
    }
  } else {
    lo = p;
    for (;;) {
      if (lo >= opt.power_cap) {
        r.warnings.push_back(fmt::format(
            "ssfm-unreached: efficiency stays below {:.3g} up to the {:.0f} W cap (last {:.3g})",
            goal, opt.power_cap, e));
        return r;
      }
      hi = std::min(lo * step, opt.power_cap);
      e = eta(hi);
      if (e >= goal) {
        eta_hi = e;
        break;
      }
      lo = hi;
    }
  }
  while ((hi - lo) > opt.power_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    const double em = eta(mid);
    if (em >= goal) {
      hi = mid;
      eta_hi = em;
    } else {
      lo = mid;
    }
  }
  r.pump_power_ssfm = hi;
  r.eta_ssfm = eta_hi;
  if (hi < r.pump_power_analytic)
    r.warnings.push_back(fmt::format(
        "ssfm-below-analytic: split-step crossing {:.3g} W lies below the phase-matched "
        "estimate {:.3g} W; parametric gain from the conjugate idler adds to the exchange",
        hi, r.pump_power_analytic));
  return r;
}

}  // namespace fwmbs
