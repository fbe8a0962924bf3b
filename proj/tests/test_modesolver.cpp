#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fwmbs/errors.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/units.hpp"

using namespace fwmbs;

namespace {

const MaterialDb& db() {
  static const MaterialDb d = load_material_db(FWMBS_DEFAULT_MATERIALS);
  return d;
}

// Transfer-matrix oracle for the fundamental slab mode. Propagate the
// substrate solution exp(q x) through the film and require the cover decay
// condition at x = d; TM matches H and H'/n^2.
double transfer_matrix_neff(const SlabLayers& s, double lambda, Polarization pol) {
  const double k0 = 2.0 * M_PI / lambda;
  const bool tm = pol == Polarization::TM;
  const double rf = tm ? s.n_film * s.n_film : 1.0;
  const double rs = tm ? s.n_substrate * s.n_substrate : 1.0;
  const double rc = tm ? s.n_cover * s.n_cover : 1.0;
  const auto residual = [&](double n) {
    const double kappa = k0 * std::sqrt(s.n_film * s.n_film - n * n);
    const double q = k0 * std::sqrt(n * n - s.n_substrate * s.n_substrate);
    const double p = k0 * std::sqrt(n * n - s.n_cover * s.n_cover);
    // film: F(x) = cos(kx) + B sin(kx), F'(0)/rf = q/rs
    const double B = q * rf / (rs * kappa);
    const double F = std::cos(kappa * s.thickness) + B * std::sin(kappa * s.thickness);
    const double dF = kappa * (-std::sin(kappa * s.thickness) + B * std::cos(kappa * s.thickness));
    return dF / rf + p / rc * F;
  };
  const double lo = std::max(s.n_cover, s.n_substrate) + 1e-12;
  const double hi = s.n_film - 1e-12;
  // highest root is the fundamental mode
  const int n_scan = 20000;
  double a = hi, fa = residual(a);
  for (int i = 1; i <= n_scan; ++i) {
    const double b = hi - (hi - lo) * i / n_scan;
    const double fb = residual(b);
    if ((fa > 0) != (fb > 0)) {
      double l = b, h = a, fl = fb;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (l + h);
        const double fm = residual(m);
        if ((fm > 0) == (fl > 0)) {
          l = m;
          fl = fm;
        } else {
          h = m;
        }
      }
      return 0.5 * (l + h);
    }
    a = b;
    fa = fb;
  }
  return NAN;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

WaveguideGeometry ridge_guide() { return WaveguideGeometry{}; }

}  // namespace

TEST_CASE("slab solver agrees with a transfer-matrix oracle") {
  const SlabLayers cases[] = {
      {1.9963, 1.0, 1.444, 550e-9},   // nitride film, air over oxide
      {3.48, 1.444, 1.444, 220e-9},   // symmetric silicon slab
      {1.75, 1.0, 1.444, 1.2e-6},     // effective film of the lateral solve
  };
  for (const auto& s : cases)
    for (auto pol : {Polarization::TE, Polarization::TM})
      for (double lam : {0.8e-6, 1.55e-6}) {
        const double got = slab_effective_index(s, lam, pol);
        const double want = transfer_matrix_neff(s, lam, pol);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
      }
}

TEST_CASE("TM index sits below TE") {
  const SlabLayers s{1.9963, 1.0, 1.444, 550e-9};
  CHECK(slab_effective_index(s, 1.55e-6, Polarization::TM) <
        slab_effective_index(s, 1.55e-6, Polarization::TE));
}

TEST_CASE("closed-form slab integrals match quadrature") {
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    const auto m = solve_slab({1.9963, 1.0, 1.444, 550e-9}, 1.55e-6, pol);
    const double a = -12.0 / m.q, b = m.thickness + 12.0 / m.p;
    const auto f2 = [&](double x) { return std::pow(m.field(x), 2); };
    const auto f4 = [&](double x) { return std::pow(m.field(x), 4); };
    // integrate piecewise so the kinks at the interfaces sit on nodes
    const double i2 = simpson(f2, a, 0, 4000) + simpson(f2, 0, m.thickness, 4000) +
                      simpson(f2, m.thickness, b, 4000);
    const double i4 = simpson(f4, a, 0, 4000) + simpson(f4, 0, m.thickness, 4000) +
                      simpson(f4, m.thickness, b, 4000);
    CHECK(m.integral_power2() == doctest::Approx(i2).epsilon(1e-8));
    CHECK(m.integral_power4() == doctest::Approx(i4).epsilon(1e-8));
  }
}

TEST_CASE("effective area of a Gaussian is pi a b") {
  const double a = 0.8e-6, b = 0.35e-6;
  const double got = effective_area_separable([&](double x) { return std::exp(-x * x / (a * a)); },
                                              -6 * a, 6 * a,
                                              [&](double y) { return std::exp(-y * y / (b * b)); },
                                              -6 * b, 6 * b);
  CHECK(got == doctest::Approx(M_PI * a * b).epsilon(1e-9));
}

TEST_CASE("EIM effective area equals quadrature of its own profile") {
  const auto mode = solve_mode(db(), ridge_guide(), 1.55e-6);
  const auto& v = mode.vertical;
  const auto& h = mode.horizontal;
  const double quad = effective_area_separable(
      [&](double x) { return v.field(x); }, -15.0 / v.q, v.thickness + 15.0 / v.p,
      [&](double y) { return h.field(y); }, -15.0 / h.q, h.thickness + 15.0 / h.p, 200001);
  CHECK(effective_area(mode) == doctest::Approx(quad).epsilon(1e-4));
}

TEST_CASE("550 x 1200 nm cross-section at 1550 nm") {
  const double n = effective_index(db(), ridge_guide(), 1.55e-6);
  // Golden value of this solver; the semi-vectorial finite-difference
  // script in tests/oracles gives 1.70301 on a 20 nm grid.
  CHECK(n == doctest::Approx(1.69781).epsilon(1e-5));
  CHECK(std::abs(n - 1.70301) < 1e-2);

  const double aeff = effective_area(db(), ridge_guide(), 1.55e-6);
  CHECK(aeff > 0.1e-12);
  CHECK(aeff < 1.5e-12);
  const double gamma = nonlinear_coefficient(aeff, kDefaultN2, 1.55e-6);
  CHECK(gamma == doctest::Approx(2 * M_PI * 2.5e-19 / (1.55e-6 * aeff)).epsilon(1e-14));
}

TEST_CASE("cutoff is reported with the wavelength") {
  WaveguideGeometry g = ridge_guide();
  g.width = 50e-9;
  try {
    effective_index(db(), g, 1.55e-6);
    FAIL("expected NoGuidedModeError");
  } catch (const NoGuidedModeError& e) {
    CHECK(std::string(e.what()).find("1550") != std::string::npos);
  }
  TableRequest req{1.0e-6, 1.6e-6, 64};
  try {
    propagation_constant_table(db(), g, req);
    FAIL("expected NoGuidedModeError");
  } catch (const NoGuidedModeError& e) {
    CHECK(std::string(e.what()).find("cutoff at") != std::string::npos);
  }
}

TEST_CASE("geometry validation") {
  WaveguideGeometry g;
  g.height = 0;
  CHECK_THROWS_AS(g.validate(db()), DomainError);
  g = WaveguideGeometry{};
  g.core = "Diamond";
  CHECK_THROWS_AS(g.validate(db()), DomainError);
}

TEST_CASE("table: serial and parallel are bit-identical") {
  TableRequest req{0.6e-6, 2.0e-6, 128};
  const auto a = propagation_constant_table(db(), ridge_guide(), req, Execution::Serial);
  const auto b = propagation_constant_table(db(), ridge_guide(), req, Execution::Parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.beta()[i] == b.beta()[i]);
    CHECK(a.gamma()[i] == b.gamma()[i]);
  }
}

TEST_CASE("table consistency with point solves") {
  TableRequest req{0.6e-6, 2.0e-6, 256};
  const auto t = propagation_constant_table(db(), ridge_guide(), req);
  const double w = omega_from_lambda(1.55e-6);
  CHECK(t.n_eff_at(w) == doctest::Approx(effective_index(db(), ridge_guide(), 1.55e-6)).epsilon(1e-8));
  // beta2 from the table agrees with a direct finite difference on the solver
  const double h = 0.002 * w;
  const auto beta = [&](double om) {
    return effective_index(db(), ridge_guide(), lambda_from_omega(om)) * om / kSpeedOfLight;
  };
  const double b2 = (beta(w + h) - 2 * beta(w) + beta(w - h)) / (h * h);
  CHECK(t.beta2_at(w) == doctest::Approx(b2).epsilon(2e-3));
  CHECK(t.dispersion_ps_nm_km(1.55e-6) > 0.0);  // anomalous at 1550 nm
  CHECK(t.dispersion_ps_nm_km(0.78e-6) < 0.0);  // normal at 780 nm
}

TEST_CASE("ZDW of a synthetic cubic profile") {
  // beta = b1 w + b3/6 (w - w0)^3  ->  beta2 = b3 (w - w0), zero at w0
  const double w0 = omega_from_lambda(1.2e-6), b3 = 1e-40;
  std::vector<double> om, be;
  for (int i = 0; i < 200; ++i) {
    const double w = omega_from_lambda(2.0e-6) + i * (omega_from_lambda(0.8e-6) - omega_from_lambda(2.0e-6)) / 199;
    om.push_back(w);
    be.push_back(7e-9 * w + b3 / 6 * std::pow(w - w0, 3));
  }
  const DispersionProfile p(om, be);
  const auto z = zero_dispersion_wavelengths(p);
  REQUIRE(z.size() == 1);
  CHECK(z[0] == doctest::Approx(1.2e-6).epsilon(1e-6));
}

TEST_CASE("profile input validation") {
  CHECK_THROWS_AS(DispersionProfile({1, 2, 3, 4}, {1, 2, 3, 4}), ShapeError);
  CHECK_THROWS_AS(DispersionProfile({1, 2, 3, 4, 5}, {1, 2, 3, 4}), ShapeError);
  CHECK_THROWS_AS(DispersionProfile({1, 2, 2, 4, 5}, {1, 2, 3, 4, 5}), ShapeError);
  CHECK_THROWS_AS(DispersionProfile({1, 2, 3, 4, 5}, {1, 3, 2, 4, 5}), ShapeError);
}
