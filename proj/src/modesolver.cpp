#include "fwmbs/modesolver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "fwmbs/errors.hpp"
#include "fwmbs/units.hpp"

namespace fwmbs {

namespace {

constexpr int kScanPoints = 200;

// Polarization-dependent boundary factor for the interface film/clad.
double boundary_ratio(double n_film, double n_clad, Polarization pol) {
  return pol == Polarization::TE ? 1.0 : (n_film * n_film) / (n_clad * n_clad);
}

struct SlabTerms {
  double kappa, p, q;
};

SlabTerms slab_terms(const SlabLayers& s, double k0, double n) {
  return {k0 * std::sqrt(std::max(0.0, s.n_film * s.n_film - n * n)),
          k0 * std::sqrt(std::max(0.0, n * n - s.n_cover * s.n_cover)),
          k0 * std::sqrt(std::max(0.0, n * n - s.n_substrate * s.n_substrate))};
}

// Fundamental-mode characteristic function; strictly decreasing in n.
double characteristic(const SlabLayers& s, double k0, double n, Polarization pol) {
  const auto t = slab_terms(s, k0, n);
  if (t.kappa == 0.0) return -std::numbers::pi;
  return t.kappa * s.thickness -
         std::atan(boundary_ratio(s.n_film, s.n_cover, pol) * t.p / t.kappa) -
         std::atan(boundary_ratio(s.n_film, s.n_substrate, pol) * t.q / t.kappa);
}

}  // namespace

void WaveguideGeometry::validate(const MaterialDb& db) const {
  if (!(width > 0.0) || !(height > 0.0) || !(length >= 0.0))
    throw DomainError("waveguide width and height must be positive and length non-negative");
  for (const auto* m : {&core, &top_clad, &substrate})
    if (!db.contains(*m)) throw DomainError("unknown material '" + *m + "'");
}

double SlabMode::field(double x) const {
  if (x < 0.0) return std::cos(phi) * std::exp(q * x);
  if (x > thickness) return std::cos(kappa * thickness - phi) * std::exp(-p * (x - thickness));
  return std::cos(kappa * x - phi);
}

double SlabMode::integral_power2() const {
  const double a = std::cos(phi);
  const double b = std::cos(kappa * thickness - phi);
  const double film =
      thickness / 2 + (std::sin(2 * (kappa * thickness - phi)) + std::sin(2 * phi)) / (4 * kappa);
  return a * a / (2 * q) + b * b / (2 * p) + film;
}

double SlabMode::integral_power4() const {
  const double a = std::cos(phi);
  const double b = std::cos(kappa * thickness - phi);
  const double u1 = kappa * thickness - phi;
  const double film = 3 * thickness / 8 + (std::sin(2 * u1) + std::sin(2 * phi)) / (4 * kappa) +
                      (std::sin(4 * u1) + std::sin(4 * phi)) / (32 * kappa);
  return std::pow(a, 4) / (4 * q) + std::pow(b, 4) / (4 * p) + film;
}

SlabMode solve_slab(const SlabLayers& s, double lambda_m, Polarization pol) {
  if (!(s.thickness > 0.0)) throw DomainError("slab thickness must be positive");
  if (!(lambda_m > 0.0)) throw DomainError("wavelength must be positive");
  const double n_lo = std::max(s.n_cover, s.n_substrate);
  if (!(s.n_film > n_lo))
    throw NoGuidedModeError(fmt::format("film index {:.6f} does not exceed cladding index {:.6f}",
                                        s.n_film, n_lo));
  const double k0 = kTwoPi / lambda_m;

  // Sign-change scan from the cladding line towards the film index. The
  // fundamental mode is the root nearest the film index.
  double hi = s.n_film;
  double lo = n_lo;
  bool bracketed = false;
  double prev_n = s.n_film;
  for (int k = kScanPoints - 1; k >= 0; --k) {
    const double n = n_lo + (s.n_film - n_lo) * k / kScanPoints;
    if (characteristic(s, k0, n, pol) > 0.0) {
      lo = n;
      hi = prev_n;
      bracketed = true;
      break;
    }
    prev_n = n;
  }
  if (!bracketed)
    throw NoGuidedModeError(fmt::format(
        "slab of thickness {:.1f} nm is below cutoff at {:.1f} nm", s.thickness * 1e9, lambda_m * 1e9));

  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (characteristic(s, k0, mid, pol) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double n = 0.5 * (lo + hi);
  if (std::abs(characteristic(s, k0, n, pol)) > 1e-6)
    throw NumericalError("slab root-finding did not converge");

  const auto t = slab_terms(s, k0, n);
  if (!(t.p > 0.0) || !(t.q > 0.0))
    throw NoGuidedModeError(fmt::format("slab mode at {:.1f} nm is at cutoff", lambda_m * 1e9));
  const double phi = std::atan(boundary_ratio(s.n_film, s.n_substrate, pol) * t.q / t.kappa);
  return {n, t.kappa, t.p, t.q, phi, s.thickness};
}

double slab_effective_index(const SlabLayers& s, double lambda_m, Polarization pol) {
  return solve_slab(s, lambda_m, pol).n_eff;
}

ModeSolution solve_mode(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                        Polarization pol) {
  g.validate(db);
  const double n_core = refractive_index(db, g.core, lambda_m);
  const double n_top = refractive_index(db, g.top_clad, lambda_m);
  const double n_sub = refractive_index(db, g.substrate, lambda_m);

  // Vertical stack keeps the requested polarization; across the width the
  // dominant field component is normal to the side walls, so the lateral
  // slab uses the complementary slab polarization.
  const Polarization lateral = pol == Polarization::TE ? Polarization::TM : Polarization::TE;
  try {
    const SlabMode v = solve_slab({n_core, n_top, n_sub, g.height}, lambda_m, pol);
    const SlabMode h = solve_slab({v.n_eff, n_top, n_top, g.width}, lambda_m, lateral);
    const double n_clad = std::max(n_top, n_sub);
    if (!(h.n_eff > n_clad && h.n_eff < n_core))
      throw NoGuidedModeError(fmt::format(
          "no guided mode at {:.1f} nm: n_eff {:.5f} not above cladding index {:.5f}",
          lambda_m * 1e9, h.n_eff, n_clad));
    return {h.n_eff, v, h};
  } catch (const NoGuidedModeError& e) {
    throw NoGuidedModeError(fmt::format("{:.6g} x {:.6g} nm waveguide, {:.1f} nm: {}", g.height * 1e9,
                                        g.width * 1e9, lambda_m * 1e9, e.what()));
  }
}

double effective_index(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                       Polarization pol) {
  return solve_mode(db, g, lambda_m, pol).n_eff;
}

double effective_area(const ModeSolution& m) {
  const double ax = std::pow(m.horizontal.integral_power2(), 2) / m.horizontal.integral_power4();
  const double ay = std::pow(m.vertical.integral_power2(), 2) / m.vertical.integral_power4();
  return ax * ay;
}

double effective_area(const MaterialDb& db, const WaveguideGeometry& g, double lambda_m,
                      Polarization pol) {
  return effective_area(solve_mode(db, g, lambda_m, pol));
}

double effective_area_separable(const std::function<double(double)>& fx, double x0, double x1,
                                const std::function<double(double)>& fy, double y0, double y1,
                                int samples) {
  if (samples < 3) throw DomainError("quadrature needs at least 3 samples");
  if (samples % 2 == 0) ++samples;
  const auto moments = [samples](const std::function<double(double)>& f, double a, double b) {
    const double h = (b - a) / (samples - 1);
    double s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double w = (i == 0 || i == samples - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double v = f(a + i * h);
      s2 += w * v * v;
      s4 += w * v * v * v * v;
    }
    return std::pair{s2 * h / 3, s4 * h / 3};
  };
  const auto [x2, x4] = moments(fx, x0, x1);
  const auto [y2, y4] = moments(fy, y0, y1);
  return (x2 * x2 / x4) * (y2 * y2 / y4);
}

double nonlinear_coefficient(double a_eff, double n2, double lambda_m) {
  if (!(a_eff > 0.0) || !(n2 > 0.0) || !(lambda_m > 0.0))
    throw DomainError("effective area, n2 and wavelength must be positive");
  return kTwoPi * n2 / (lambda_m * a_eff);
}

// ---------------------------------------------------------------------------

DispersionProfile::DispersionProfile(std::vector<double> omega, std::vector<double> beta,
                                     std::vector<double> gamma)
    : omega_(std::move(omega)), beta_(std::move(beta)), gamma_(std::move(gamma)) {
  if (omega_.size() != beta_.size()) throw ShapeError("omega and beta differ in length");
  if (omega_.size() < 5) throw ShapeError("dispersion profile needs at least 5 points");
  if (gamma_.empty()) gamma_.assign(omega_.size(), 0.0);
  if (gamma_.size() != omega_.size()) throw ShapeError("gamma and omega differ in length");
  for (std::size_t i = 1; i < omega_.size(); ++i) {
    if (!(omega_[i] > omega_[i - 1])) throw ShapeError("omega grid must be strictly increasing");
    if (!(beta_[i] > beta_[i - 1])) throw ShapeError("beta must be strictly increasing in omega");
  }
  beta2_ = second_derivative_on_grid(omega_, beta_);
  beta_table_ = CubicTable(omega_, beta_);
  beta2_table_ = CubicTable(omega_, beta2_);
  gamma_table_ = CubicTable(omega_, gamma_);
}

double DispersionProfile::n_eff_at(double omega) const {
  return beta_at(omega) * kSpeedOfLight / omega;
}

double DispersionProfile::dispersion_ps_nm_km(double lambda_m) const {
  const double w = omega_from_lambda(lambda_m);
  return dispersion_parameter({beta2_at(w)}, {lambda_m}).ps_per_nm_km();
}

DispersionProfile propagation_constant_table(const MaterialDb& db, const WaveguideGeometry& g,
                                             const TableRequest& req, Execution exec) {
  if (req.n_points < 64) throw DomainError("dispersion table needs at least 64 points");
  if (!(req.lambda_min > 0.0) || !(req.lambda_min < req.lambda_max))
    throw DomainError("wavelength range must satisfy 0 < lambda_min < lambda_max");
  g.validate(db);

  const int n = req.n_points;
  const double w0 = omega_from_lambda(req.lambda_max);
  const double w1 = omega_from_lambda(req.lambda_min);
  std::vector<double> omega(n), beta(n), gamma(n);
  std::vector<std::exception_ptr> failure(n);

  const auto point = [&](int i) {
    omega[i] = w0 + (w1 - w0) * i / (n - 1);
    const double lam = lambda_from_omega(omega[i]);
    try {
      const auto mode = solve_mode(db, g, lam, req.polarization);
      beta[i] = mode.n_eff * omega[i] / kSpeedOfLight;
      gamma[i] = nonlinear_coefficient(effective_area(mode), req.n2, lam);
    } catch (const std::exception&) {
      failure[i] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) point(i);
  } else {
    for (int i = 0; i < n; ++i) point(i);
  }

  // Report the shortest failing wavelength (highest omega index).
  for (int i = n - 1; i >= 0; --i) {
    if (!failure[i]) continue;
    const double lam_nm = lambda_from_omega(omega[i]) * 1e9;
    try {
      std::rethrow_exception(failure[i]);
    } catch (const NoGuidedModeError& e) {
      throw NoGuidedModeError(fmt::format("cutoff at {:.3f} nm: {}", lam_nm, e.what()));
    } catch (const PhysicsError& e) {
      throw NumericalError(fmt::format("mode solve failed at {:.3f} nm: {}", lam_nm, e.what()));
    } catch (const std::exception& e) {
      throw DomainError(fmt::format("mode solve failed at {:.3f} nm: {}", lam_nm, e.what()));
    }
  }

  DispersionProfile p(std::move(omega), std::move(beta), std::move(gamma));
  p.geometry = g;
  p.polarization = req.polarization;
  p.n2 = req.n2;
  return p;
}

std::vector<double> zero_dispersion_wavelengths(const DispersionProfile& p) {
  const auto w = p.omega();
  const auto b2 = p.beta2();
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (b2[i] == 0.0) {
      roots.push_back(w[i]);
      continue;
    }
    if ((b2[i] < 0.0) == (b2[i + 1] < 0.0) || b2[i + 1] == 0.0) continue;
    double lo = w[i], hi = w[i + 1];
    const bool lo_negative = b2[i] < 0.0;
    for (int it = 0; it < 200 && hi - lo > 2 * std::numeric_limits<double>::epsilon() * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((p.beta2_at(mid) < 0.0) == lo_negative)
        lo = mid;
      else
        hi = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  if (!w.empty() && b2.back() == 0.0) roots.push_back(w.back());
  std::vector<double> lambdas;
  for (double r : roots) lambdas.push_back(lambda_from_omega(r));
  std::sort(lambdas.begin(), lambdas.end());
  return lambdas;
}

}  // namespace fwmbs
