#include "fwmbs/ssfm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "fwmbs/errors.hpp"
#include "fwmbs/kernels.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

constexpr std::size_t kOverflowCheckEvery = 16;

double nm_of(double omega) { return kTwoPi * kSpeedOfLight / omega * 1e9; }

// Signed bin offset from the carrier for FFT index k.
std::ptrdiff_t offset_of(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<std::ptrdiff_t>(k)
                   : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
}

std::size_t index_of(std::ptrdiff_t offset, std::size_t n) {
  return offset >= 0 ? static_cast<std::size_t>(offset)
                     : static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(n));
}

}  // namespace

double TimeFrequencyGrid::d_omega() const { return kTwoPi / time_window; }

double TimeFrequencyGrid::bin_omega(std::size_t k) const {
  return carrier_omega + static_cast<double>(offset_of(k, n_points)) * d_omega();
}

std::optional<std::size_t> TimeFrequencyGrid::bin_of(double omega) const {
  const double x = std::round((omega - carrier_omega) / d_omega());
  const double half = static_cast<double>(n_points / 2);
  if (!(x >= -half && x <= half - 1.0)) return std::nullopt;
  return index_of(static_cast<std::ptrdiff_t>(x), n_points);
}

SnappedTone snap(const TimeFrequencyGrid& grid, const Tone& tone) {
  const auto k = grid.bin_of(tone.omega);
  if (!k)
    throw DomainError(fmt::format("tone at {:.3f} nm lies outside the simulation grid",
                                  nm_of(tone.omega)));
  SnappedTone s;
  s.requested = tone;
  s.bin = *k;
  s.omega = grid.bin_omega(*k);
  s.relative_error = std::abs(s.omega - tone.omega) / tone.omega;
  return s;
}

GridBuild build_grid(std::span<const Tone> tones, const GridPolicy& policy) {
  if (tones.empty()) throw DomainError("grid needs at least one tone");
  if (!(policy.margin_factor >= 1.1))
    throw DomainError(fmt::format("grid margin factor {} must be at least 1.1",
                                  policy.margin_factor));
  if (!(policy.max_relative_snap > 0.0)) throw DomainError("snap tolerance must be positive");
  if (!std::has_single_bit(policy.min_points) || !std::has_single_bit(policy.max_points) ||
      policy.min_points > policy.max_points)
    throw DomainError("grid size limits must be powers of two");

  double lo = tones.front().omega, hi = lo;
  for (const Tone& t : tones) {
    if (!(t.omega > 0.0) || !std::isfinite(t.omega))
      throw DomainError("tone frequencies must be positive");
    if (!(t.power >= 0.0) || !std::isfinite(t.power))
      throw DomainError("tone powers must be non-negative");
    lo = std::min(lo, t.omega);
    hi = std::max(hi, t.omega);
  }

  // Worst-case snap is half a bin; stay strictly inside the tolerance.
  const double d_omega = 1.9 * policy.max_relative_snap * lo;
  const double spread = hi - lo;
  const double needed = std::ceil(policy.margin_factor * spread / d_omega);
  if (needed > static_cast<double>(policy.max_points))
    throw DomainError(fmt::format(
        "tone spread {:.1f}-{:.1f} nm needs {:.0f} grid points (cap {}); narrow the setup",
        nm_of(hi), nm_of(lo), needed, policy.max_points));
  std::size_t n = std::bit_ceil(static_cast<std::size_t>(std::max(needed, 1.0)));
  n = std::max(n, policy.min_points);

  GridBuild out;
  out.grid.n_points = n;
  out.grid.time_window = kTwoPi / d_omega;
  out.grid.carrier_omega = 0.5 * (lo + hi);
  out.tones.reserve(tones.size());
  for (const Tone& t : tones) out.tones.push_back(snap(out.grid, t));
  return out;
}

// ---------------------------------------------------------------------------

FieldEnvelope::FieldEnvelope(TimeFrequencyGrid grid, ComplexVector samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (!std::has_single_bit(grid_.n_points) || samples_.size() != grid_.n_points)
    throw ShapeError(fmt::format("field has {} samples for a {}-point grid", samples_.size(),
                                 grid_.n_points));
}

double FieldEnvelope::total_power() const {
  return kernels::sum_power(samples_, Execution::Serial) / static_cast<double>(samples_.size());
}

ComplexVector FieldEnvelope::spectrum() const {
  ComplexVector a = samples_;
  Fft(a.size()).to_spectrum(a);
  return a;
}

std::vector<double> FieldEnvelope::spectral_power() const {
  const ComplexVector a = spectrum();
  std::vector<double> p(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) p[k] = std::norm(a[k]);
  return p;
}

FieldEnvelope inject_cw_tones(const TimeFrequencyGrid& grid, std::span<const Tone> tones) {
  ComplexVector a(grid.n_points, Complex{0.0, 0.0});
  std::set<std::size_t> used;
  for (const Tone& t : tones) {
    if (!(t.power >= 0.0) || !std::isfinite(t.power))
      throw DomainError("tone powers must be non-negative");
    const SnappedTone s = snap(grid, t);
    if (!used.insert(s.bin).second)
      throw DomainError(fmt::format("tones collide in the grid bin at {:.4f} nm", nm_of(s.omega)));
    a[s.bin] = std::polar(std::sqrt(t.power), t.phase);
  }
  Fft(grid.n_points).to_time(a);
  return FieldEnvelope(grid, std::move(a));
}

FieldEnvelope inject_super_gaussian(const TimeFrequencyGrid& grid, double omega, double peak_power,
                                    double t0, int order) {
  if (!(peak_power >= 0.0) || !(t0 > 0.0) || order < 1)
    throw DomainError("super-Gaussian needs power >= 0, t0 > 0 and order >= 1");
  const SnappedTone s = snap(grid, Tone{omega, peak_power, 0.0});
  const std::ptrdiff_t k = offset_of(s.bin, grid.n_points);
  const double n = static_cast<double>(grid.n_points);
  const double dt = grid.time_window / n;
  ComplexVector a(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double t = (static_cast<double>(j) - 0.5 * n) * dt;
    const double env = std::exp(-0.5 * std::pow(std::abs(t / t0), 2.0 * order));
    // Same sign convention as Fft::to_time.
    const double ph = -kTwoPi * static_cast<double>(k) * static_cast<double>(j) / n;
    a[j] = std::polar(std::sqrt(peak_power) * env, ph);
  }
  return FieldEnvelope(grid, std::move(a));
}

double band_power(const TimeFrequencyGrid& grid, std::span<const double> p, double center,
                  double bandwidth) {
  if (p.size() != grid.n_points) throw ShapeError("spectral power does not match the grid");
  if (!(bandwidth > 0.0)) throw DomainError("band has no width");
  const double dw = grid.d_omega();
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(grid.n_points / 2);
  const double lo = (center - 0.5 * bandwidth - grid.carrier_omega) / dw;
  const double hi = (center + 0.5 * bandwidth - grid.carrier_omega) / dw;
  // Bins with lo <= offset < hi.
  std::ptrdiff_t first = static_cast<std::ptrdiff_t>(std::ceil(lo));
  std::ptrdiff_t last = static_cast<std::ptrdiff_t>(std::ceil(hi)) - 1;
  first = std::max(first, -half);
  last = std::min(last, half - 1);
  if (first > last)
    throw DomainError(fmt::format("band around {:.4f} nm contains no grid bins", nm_of(center)));
  double sum = 0.0;
  for (std::ptrdiff_t m = first; m <= last; ++m) sum += p[index_of(m, grid.n_points)];
  return sum;
}

double band_power(const FieldEnvelope& field, double center, double bandwidth) {
  const auto p = field.spectral_power();
  return band_power(field.grid(), p, center, bandwidth);
}

// ---------------------------------------------------------------------------

double RunLog::relative_power_change() const {
  if (initial_power == 0.0) return final_power == 0.0 ? 0.0 : INFINITY;
  return std::abs(final_power - initial_power) / initial_power;
}

Propagation propagate(const FieldEnvelope& input, const PropagationSpec& spec, Execution exec) {
  if (!spec.profile) throw DomainError("propagation has no dispersion profile");
  if (!(spec.gamma_carrier >= 0.0) || !std::isfinite(spec.gamma_carrier))
    throw DomainError("nonlinear coefficient must be non-negative");
  if (!(spec.length > 0.0)) throw DomainError("propagation length must be positive");
  if (!(spec.step > 0.0) || spec.step > spec.length)
    throw DomainError(fmt::format("step {} m must lie in (0, length]", spec.step));
  if (!(spec.loss_db_per_m >= 0.0)) throw DomainError("loss must be non-negative");

  const DispersionProfile& prof = *spec.profile;
  const TimeFrequencyGrid& grid = input.grid();
  const std::size_t n = grid.n_points;
  const double w0 = grid.carrier_omega;
  if (!prof.covers(w0))
    throw DomainError(fmt::format("grid carrier {:.2f} nm lies outside the dispersion table",
                                  nm_of(w0)));

  const auto steps = static_cast<std::size_t>(std::ceil(spec.length / spec.step - 1e-9));
  const double h = spec.length / static_cast<double>(steps);

  const double beta0 = prof.beta_at(w0), beta1 = prof.beta1_at(w0);
  std::vector<double> phase(n, 0.0);
  std::vector<unsigned char> outside(n, 0);
  const auto fill = [&](std::ptrdiff_t k) {
    const double w = grid.bin_omega(static_cast<std::size_t>(k));
    if (prof.covers(w)) {
      phase[k] = prof.beta_at(w) - beta0 - beta1 * (w - w0);
    } else {
      outside[k] = 1;
    }
  };
  const auto sn = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < sn; ++k) fill(k);
  } else {
    for (std::ptrdiff_t k = 0; k < sn; ++k) fill(k);
  }

  // Power loss alpha (1/m); amplitude decays at alpha/2, so exp(-alpha h/4)
  // per half step.
  const double alpha = spec.loss_db_per_m * std::log(10.0) / 10.0;
  const double half_amp = std::exp(-alpha * h / 4.0);
  ComplexVector half(n), full(n);
  kernels::build_propagator(half, phase, 0.5 * h, half_amp, exec);
  kernels::build_propagator(full, phase, h, half_amp * half_amp, exec);

  const Fft fft(n);
  ComplexVector a = input.spectrum();
  RunLog log;
  log.steps = steps;
  log.step = h;
  log.initial_power = kernels::sum_power(a, exec);

  const auto check_overflow = [&](const ComplexVector& spec_a) {
    const double total = kernels::sum_power(spec_a, exec);
    if (total == 0.0) return;
    const double frac = kernels::sum_power_masked(spec_a, outside, exec) / total;
    log.power_outside_table = std::max(log.power_outside_table, frac);
    if (frac > kMaxPowerOutsideTable)
      throw SpectralOverflowError(fmt::format(
          "{:.2f} % of the power lies outside the dispersion table ({:.1f}-{:.1f} nm); widen "
          "the table",
          100.0 * frac, nm_of(prof.omega_max()), nm_of(prof.omega_min())));
  };
  check_overflow(a);

  const double gamma_h = spec.gamma_carrier * h;
  for (std::size_t s = 0; s < steps; ++s) {
    kernels::multiply(a, s == 0 ? half : full, exec);
    fft.to_time(a);
    const double peak = kernels::kerr_step(a, gamma_h, exec);
    const double phi = gamma_h * peak;
    log.max_nonlinear_phase = std::max(log.max_nonlinear_phase, phi);
    if (phi >= kMaxNonlinearPhasePerStep)
      throw StepSizeError(fmt::format(
          "nonlinear phase {:.3g} rad per step exceeds {} rad; use a step below {:.3g} m", phi,
          kMaxNonlinearPhasePerStep, kMaxNonlinearPhasePerStep / (spec.gamma_carrier * peak)));
    fft.to_spectrum(a);
    if ((s + 1) % kOverflowCheckEvery == 0) check_overflow(a);
  }
  kernels::multiply(a, half, exec);
  check_overflow(a);
  log.final_power = kernels::sum_power(a, exec);

  fft.to_time(a);
  return Propagation{FieldEnvelope(grid, std::move(a)), log};
}

// ---------------------------------------------------------------------------

double experiment_signal_power(const BraggScatteringSetup& s) {
  if (s.signal_power > 0.0) return s.signal_power;
  double pmin = INFINITY;
  for (double p : {s.p1, s.p2})
    if (p > 0.0) pmin = std::min(pmin, p);
  return std::isfinite(pmin) ? 1e-6 * pmin : 1e-6;
}

ExperimentResult bs_conversion_experiment(const BraggScatteringSetup& setup,
                                          const ExperimentPolicy& policy, Execution exec) {
  setup.validate();
  const DispersionProfile& prof = *setup.profile;
  const IdlerPair idl = idler_frequencies(setup.omega_p1, setup.omega_p2, setup.omega_s);

  ExperimentResult r;
  r.signal_power = experiment_signal_power(setup);
  const Tone p1{setup.omega_p1, setup.p1, 0.0};
  const Tone p2{setup.omega_p2, setup.p2, 0.0};
  const Tone sig{setup.omega_s, r.signal_power, 0.0};
  const std::vector<Tone> all{p1, p2, sig, Tone{idl.plus, 0.0, 0.0}, Tone{idl.minus, 0.0, 0.0}};
  r.grid = build_grid(all, policy.grid);
  const TimeFrequencyGrid& grid = r.grid.grid;

  // The idlers land on bins exactly because the pumps and signal do.
  const auto off = [&](std::size_t i) { return offset_of(r.grid.tones[i].bin, grid.n_points); };
  const std::ptrdiff_t k1 = off(0), k2 = off(1), ks = off(2);
  const std::ptrdiff_t kp = k2 + (ks - k1), km = k2 - (ks - k1);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(grid.n_points / 2);
  for (std::ptrdiff_t k : {kp, km}) {
    if (k < -half || k >= half) throw DomainError("idler falls outside the simulation grid");
    if (k == k1 || k == k2 || k == ks)
      throw DomainError("signal is within one grid bin of a pump; idler and pump coincide");
  }
  const std::size_t ip = index_of(kp, grid.n_points), im = index_of(km, grid.n_points);
  r.idler_plus_omega = grid.bin_omega(ip);
  r.idler_minus_omega = grid.bin_omega(im);

  if (policy.gamma_carrier) {
    r.gamma_carrier = *policy.gamma_carrier;
  } else {
    const double g = prof.covers(grid.carrier_omega) ? prof.gamma_at(grid.carrier_omega) : 0.0;
    r.gamma_carrier = g > 0.0 ? g : std::sqrt(setup.gamma1 * setup.gamma2);
  }

  const std::vector<Tone> injected{Tone{r.grid.tones[0].omega, p1.power, 0.0},
                                   Tone{r.grid.tones[1].omega, p2.power, 0.0},
                                   Tone{r.grid.tones[2].omega, sig.power, 0.0}};
  const FieldEnvelope field = inject_cw_tones(grid, injected);

  PropagationSpec ps;
  ps.profile = setup.profile;
  ps.gamma_carrier = r.gamma_carrier;
  ps.length = setup.length;
  ps.loss_db_per_m = policy.loss_db_per_m;
  if (policy.step > 0.0) {
    ps.step = std::min(policy.step, setup.length);
  } else {
    // Peak |a|^2 of the tone sum bounds the per-step phase.
    const double amp = std::sqrt(p1.power) + std::sqrt(p2.power) + std::sqrt(sig.power);
    const double rate = r.gamma_carrier * amp * amp;
    const double min_steps = static_cast<double>(std::max<std::size_t>(policy.min_steps, 1));
    ps.step = setup.length / min_steps;
    if (rate > 0.0) ps.step = std::min(ps.step, policy.target_phase_per_step / rate);
  }

  Propagation out = propagate(field, ps, exec);
  r.log = out.log;
  r.conserved_power_error = out.log.relative_power_change();

  const ComplexVector a = out.field.spectrum();
  r.eta_plus = std::norm(a[ip]) / r.signal_power;
  r.eta_minus = std::norm(a[im]) / r.signal_power;
  r.signal_out = std::norm(a[r.grid.tones[2].bin]);

  std::vector<std::ptrdiff_t> order;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::norm(a[k]) > policy.spectrum_floor_w && grid.bin_omega(k) > 0.0)
      order.push_back(offset_of(k, grid.n_points));
  std::sort(order.begin(), order.end());
  r.spectrum.reserve(order.size());
  for (std::ptrdiff_t m : order) {
    const std::size_t k = index_of(m, grid.n_points);
    r.spectrum.push_back({grid.bin_omega(k), std::norm(a[k])});
  }
  return r;
}

}  // namespace fwmbs
