#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fwmbs/cmt.hpp"
#include "fwmbs/errors.hpp"
#include "fwmbs/export.hpp"
#include "fwmbs/units.hpp"

using namespace fwmbs;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::shared_ptr<DispersionProfile> toy_profile() {
  std::vector<double> om, be;
  for (int i = 0; i < 64; ++i) {
    const double w = 1.0e15 + i * 2e13;
    const double x = w - 1.6e15;
    om.push_back(w);
    be.push_back(7e6 + 5e-9 * x + 1e-25 * x * x);
  }
  return std::make_shared<DispersionProfile>(om, be, std::vector<double>(64, 2.0));
}

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(1234567890123.0) == "1.23456789012e+12");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("profile CSV: preamble, ascending wavelength, determinism") {
  const auto p = toy_profile();
  std::ostringstream a, b;
  write_profile_csv(a, *p, "deadbeef");
  write_profile_csv(b, *p, "deadbeef");
  CHECK(a.str() == b.str());
  const auto l = lines_of(a.str());
  REQUIRE(l.size() == 4 + 64);
  CHECK(l[0] == "# schema_version=1");
  CHECK(l[1] == "# config_hash=deadbeef");
  CHECK(l[2] == "# generator=fwmbs " + tool_version());
  CHECK(l[3] == "lambda_nm,omega_rad_s,n_eff,beta_rad_m,beta2_s2_m,D_ps_nm_km,gamma_W_m");
  double prev = 0.0;
  for (std::size_t i = 4; i < l.size(); ++i) {
    const double lam = std::stod(l[i].substr(0, l[i].find(',')));
    CHECK(lam > prev);
    prev = lam;
  }
}

TEST_CASE("curve and spectrum CSV") {
  BraggScatteringSetup s;
  s.profile = toy_profile();
  s.omega_p1 = 1.2e15;
  s.omega_p2 = 1.8e15;
  s.omega_s = 1.21e15;
  s.p1 = s.p2 = 0.1;
  s.gamma1 = s.gamma2 = 2.0;
  s.length = 0.01;
  const auto curve = phase_matching_curve(s, 1.205e15, 1.215e15, 5, Branch::Plus);
  std::ostringstream os;
  write_curve_csv(os, curve, "h");
  const auto l = lines_of(os.str());
  REQUIRE(l.size() == 4 + 5);
  CHECK(l[3] == "lambda_s_nm,lambda_i_nm,kappa_rad_m,eta,eta_db,eta_normalized");

  const std::vector<SpectrumLine> spec{{1.3e15, 1e-3}, {1.2e15, 0.0}};
  std::ostringstream ss;
  write_spectrum_csv(ss, spec, "h");
  const auto m = lines_of(ss.str());
  REQUIRE(m.size() == 6);
  CHECK(m[3] == "lambda_nm,power_w,power_dbm");
  CHECK(m[4].find(",0.001,0") != std::string::npos);  // shorter wavelength first
  CHECK(m[5].find(",0,-inf") != std::string::npos);
}

TEST_CASE("write_file creates directories") {
  const auto dir = std::filesystem::temp_directory_path() / "fwmbs_export_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_file(dir / "x.txt", "hello\n");
  std::ifstream in(dir / "x.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");
  std::filesystem::remove_all(dir.parent_path());
}
