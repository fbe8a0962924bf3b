#include "fwmbs/cmt.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fwmbs/errors.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

void require_on_table(const DispersionProfile& p, double omega, const char* what) {
  if (!p.covers(omega))
    throw DomainError(fmt::format("{} at {:.3f} nm lies outside the dispersion table", what,
                                  kTwoPi * kSpeedOfLight / omega * 1e9));
}

// Conversion efficiency without the distinct-frequency check, so sweeps may
// pass through the degenerate point.
ConversionResult evaluate(const BraggScatteringSetup& s, Branch b, double omega_s, double z) {
  BraggScatteringSetup local = s;
  local.omega_s = omega_s;
  ConversionResult r;
  r.branch = b;
  r.idler_omega = idler_frequency(s.omega_p1, s.omega_p2, omega_s, b);
  r.mismatch = phase_mismatch(local, b);
  const double coupling2 = 4.0 * s.gamma1 * s.gamma2 * s.p1 * s.p2;
  const double half_kappa = 0.5 * r.mismatch.total;
  r.g = std::sqrt(coupling2 + half_kappa * half_kappa);
  if (coupling2 == 0.0 || r.g == 0.0) {
    r.eta = 0.0;
  } else {
    const double sn = std::sin(r.g * z);
    r.eta = coupling2 / (r.g * r.g) * sn * sn;
  }
  return r;
}

}  // namespace

std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

IdlerPair idler_frequencies(double w1, double w2, double ws) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(ws > 0.0))
    throw DomainError("pump and signal frequencies must be positive");
  const IdlerPair r{w2 + (ws - w1), w2 - (ws - w1)};
  if (!(r.plus > 0.0) || !(r.minus > 0.0))
    throw DomainError("idler frequency would be non-positive");
  return r;
}

IdlerPair narrowband_idler(double ws, double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(ws > 0.0))
    throw DomainError("pump and signal frequencies must be positive");
  const IdlerPair r{ws + (w2 - w1), ws - (w2 - w1)};
  if (!(r.plus > 0.0) || !(r.minus > 0.0))
    throw DomainError("idler frequency would be non-positive");
  return r;
}

double idler_frequency(double w1, double w2, double ws, Branch b) {
  const auto pair = idler_frequencies(w1, w2, ws);
  return b == Branch::Plus ? pair.plus : pair.minus;
}

double linear_phase_mismatch(const DispersionProfile& p, double w1, double w2, double ws,
                             double wi, Branch b) {
  require_on_table(p, w1, "pump 1");
  require_on_table(p, w2, "pump 2");
  require_on_table(p, ws, "signal");
  require_on_table(p, wi, "idler");
  const double b1 = p.beta_at(w1), b2 = p.beta_at(w2), bs = p.beta_at(ws), bi = p.beta_at(wi);
  // Group terms pairwise so the two near-equal partners cancel first.
  if (b == Branch::Plus) return (b1 - bs) + (bi - b2);
  return (bs - b1) + (bi - b2);
}

double nonlinear_phase_mismatch(double gamma1, double p1, double gamma2, double p2) {
  if (p1 < 0.0 || p2 < 0.0) throw DomainError("pump powers must be non-negative");
  return gamma1 * p1 - gamma2 * p2;
}

void BraggScatteringSetup::validate() const {
  if (!profile) throw DomainError("setup has no dispersion profile");
  if (!(omega_p1 > 0.0) || !(omega_p2 > 0.0) || !(omega_s > 0.0))
    throw DomainError("frequencies must be positive");
  if (omega_p1 == omega_p2 || omega_p1 == omega_s || omega_p2 == omega_s)
    throw DomainError("pump and signal frequencies must be distinct");
  require_on_table(*profile, omega_p1, "pump 1");
  require_on_table(*profile, omega_p2, "pump 2");
  require_on_table(*profile, omega_s, "signal");
  if (p1 < 0.0 || p2 < 0.0 || signal_power < 0.0) throw DomainError("powers must be non-negative");
  if (gamma1 < 0.0 || gamma2 < 0.0) throw DomainError("nonlinear coefficients must be non-negative");
  if (!(length >= 0.0)) throw DomainError("length must be non-negative");
}

PhaseMismatch phase_mismatch(const BraggScatteringSetup& s, Branch b) {
  const double wi = idler_frequency(s.omega_p1, s.omega_p2, s.omega_s, b);
  PhaseMismatch m;
  m.linear = linear_phase_mismatch(*s.profile, s.omega_p1, s.omega_p2, s.omega_s, wi, b);
  m.nonlinear = b == Branch::Plus ? -nonlinear_phase_mismatch(s.gamma1, s.p1, s.gamma2, s.p2)
                                  : s.gamma1 * s.p1 + s.gamma2 * s.p2;
  m.total = m.linear + m.nonlinear;
  return m;
}

ConversionResult conversion_efficiency(const BraggScatteringSetup& s, Branch b, double z) {
  s.validate();
  if (!(z >= 0.0 && z <= s.length))
    throw DomainError(fmt::format("z = {} m outside [0, {}] m", z, s.length));
  return evaluate(s, b, s.omega_s, z);
}

std::vector<CurvePoint> phase_matching_curve(const BraggScatteringSetup& s, double omega_min,
                                             double omega_max, int n_points, Branch b,
                                             Execution exec) {
  if (n_points < 1) throw DomainError("phase-matching sweep is empty");
  if (!s.profile) throw DomainError("setup has no dispersion profile");
  if (omega_min > omega_max) std::swap(omega_min, omega_max);
  if (n_points > 1 && omega_min == omega_max) throw DomainError("signal sweep range is empty");
  std::vector<CurvePoint> out(n_points);
  const auto point = [&](int i) {
    const double ws =
        n_points == 1 ? omega_min : omega_min + (omega_max - omega_min) * i / (n_points - 1);
    const auto r = evaluate(s, b, ws, s.length);
    out[i] = {ws, r.idler_omega, r.mismatch.total, r.eta, 0.0};
  };
  // Validate the edges up front so errors surface deterministically.
  require_on_table(*s.profile, omega_min, "signal");
  require_on_table(*s.profile, omega_max, "signal");
  if (exec == Execution::Parallel) {
    std::vector<std::exception_ptr> errs(n_points);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_points; ++i) {
      try {
        point(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  } else {
    for (int i = 0; i < n_points; ++i) point(i);
  }
  double peak = 0.0;
  for (const auto& p : out) peak = std::max(peak, p.eta);
  for (auto& p : out) p.eta_normalized = peak > 0.0 ? p.eta / peak : 0.0;
  return out;
}

NullWidth first_null_width(const BraggScatteringSetup& s, double omega_min, double omega_max,
                           Branch b, int coarse_points) {
  const auto curve = phase_matching_curve(s, omega_min, omega_max, coarse_points, b);
  std::size_t ipk = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].eta > curve[ipk].eta) ipk = i;
  if (curve[ipk].eta <= 0.0) throw NumericalError("phase-matching curve is identically zero");

  std::size_t il = ipk, ir = ipk;
  while (il > 0 && curve[il - 1].eta < curve[il].eta) --il;
  while (ir + 1 < curve.size() && curve[ir + 1].eta < curve[ir].eta) ++ir;
  if (il == 0 || ir + 1 == curve.size())
    throw NumericalError("first null of the phase-matching curve lies outside the sweep range");

  const auto eta_at = [&](double ws) { return evaluate(s, b, ws, s.length).eta; };
  const auto golden_min = [&](double a, double c) {
    constexpr double r = 0.6180339887498949;
    double x1 = c - r * (c - a), x2 = a + r * (c - a);
    double f1 = eta_at(x1), f2 = eta_at(x2);
    for (int it = 0; it < 200 && (c - a) > 1e-13 * std::abs(c); ++it) {
      if (f1 < f2) {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - r * (c - a);
        f1 = eta_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (c - a);
        f2 = eta_at(x2);
      }
    }
    return 0.5 * (a + c);
  };
  NullWidth w;
  w.omega_peak = curve[ipk].omega_s;
  w.omega_left = golden_min(curve[il - 1].omega_s, curve[il + 1].omega_s);
  w.omega_right = golden_min(curve[ir - 1].omega_s, curve[ir + 1].omega_s);
  return w;
}

ModulationInstabilityReport modulation_instability_check(const DispersionProfile& profile,
                                                         double omega_pump, double power,
                                                         double gamma) {
  require_on_table(profile, omega_pump, "pump");
  if (power < 0.0 || gamma < 0.0) throw DomainError("power and gamma must be non-negative");
  ModulationInstabilityReport r{};
  r.beta2 = profile.beta2_at(omega_pump);
  r.regime = r.beta2 < 0.0 ? DispersionRegime::Anomalous : DispersionRegime::Normal;
  if (r.regime == DispersionRegime::Normal || power == 0.0 || gamma == 0.0) return r;
  r.peak_gain = gamma * power;
  r.peak_detuning = std::sqrt(2.0 * gamma * power / std::abs(r.beta2));
  return r;
}

}  // namespace fwmbs
