#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skyrlab/config.hpp"
#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"
#include "skyrlab/params.hpp"

using namespace skyrlab;

static MaterialParams baseline() {
  MaterialParams m;
  m.Ms = 580e3;
  m.Aex = 15e-12;
  m.Dmi = 3.0e-3;
  m.Ku = 0.8e6;
  m.alpha = 0.1;
  m.thickness = 1e-9;
  return m;
}

TEST_CASE("exchange length of the baseline material") {
  auto s = derive_scales(baseline());
  CHECK(s.l_ex == doctest::Approx(8.4e-9).epsilon(0.01).scale(0.0));
}

TEST_CASE("wall width across the anisotropy sweep range") {
  auto m = baseline();
  m.Ku = 1.5e6;
  CHECK(derive_scales(m).delta_dw == doctest::Approx(3.162e-9).epsilon(0.001).scale(0.0));
  m.Ku = 0.8e6;
  CHECK(derive_scales(m).delta_dw == doctest::Approx(4.330e-9).epsilon(0.001).scale(0.0));
}

TEST_CASE("effective anisotropy subtracts the thin-film demag term") {
  auto s = derive_scales(baseline());
  double expected = 0.8e6 - 0.5 * constants::mu0 * 580e3 * 580e3;
  CHECK(s.k_eff == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s.k_eff > 0);
}

TEST_CASE("in-plane easy axis is rejected") {
  auto m = baseline();
  m.Ku = 1e5;  // below mu0*Ms^2/2 = 2.11e5
  CHECK_THROWS_AS(derive_scales(m), Error);
  try {
    derive_scales(m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPerpendicularEasyAxis);
  }
}

TEST_CASE("scale consistency: doubling Aex scales both lengths by sqrt(2)") {
  auto m = baseline();
  auto s1 = derive_scales(m);
  m.Aex *= 2.0;
  auto s2 = derive_scales(m);
  CHECK(s2.l_ex == doctest::Approx(s1.l_ex * std::sqrt(2.0)).epsilon(1e-14).scale(0.0));
  CHECK(s2.delta_dw == doctest::Approx(s1.delta_dw * std::sqrt(2.0)).epsilon(1e-14).scale(0.0));
}

TEST_CASE("minimal config gets documented defaults") {
  auto cfg = parse_config("[material]\n");
  CHECK(cfg.num("material", "Ms") == 580e3);
  CHECK(cfg.num("material", "Aex") == 15e-12);
  CHECK(cfg.num("material", "Dmi") == 3.0e-3);
  CHECK(cfg.num("material", "alpha") == 0.1);
  CHECK(cfg.num("geometry", "track_length") == 300e-9);
  CHECK(cfg.integer("lindblad", "t_points") == 400);
  CHECK(cfg.flag("transmon", "exact_column"));
  CHECK(cfg.token("drive", "torque_kind") == "sot");
  // every key not in the file shows up in the defaults log
  CHECK(!cfg.applied_defaults.empty());
  bool found = false;
  for (const auto& line : cfg.applied_defaults) {
    if (line.rfind("material.Ms", 0) == 0) found = true;
  }
  CHECK(found);
}

TEST_CASE("negative Ku is a schema violation naming the key") {
  CHECK_THROWS_AS(parse_config("[material]\nKu = -1\n"), Error);
  try {
    parse_config("[material]\nKu = -1\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    REQUIRE(e.violations().size() == 1);
    CHECK(e.violations()[0].find("material.Ku") != std::string::npos);
  }
}

TEST_CASE("all violations are collected, not just the first") {
  std::string text =
      "[material]\n"
      "Ku = -1\n"
      "alpha = 2\n"
      "bogus = 3\n"
      "[nosuch]\n"
      "x = 1\n";
  try {
    parse_config(text);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    CHECK(e.violations().size() == 4);
  }
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config("[rotor]\nnot_a_key = 1\n"), Error);
}

TEST_CASE("torque kind must be a known token") {
  CHECK_THROWS_AS(parse_config("[drive]\ntorque_kind = magic\n"), Error);
  auto cfg = parse_config("[drive]\ntorque_kind = stt\n");
  CHECK(drive_from_config(cfg).torque_kind == TorqueKind::SttZhangLi);
}

TEST_CASE("polarization must be a unit vector") {
  std::string text =
      "[drive]\n"
      "polarization_x = 0.5\n"
      "polarization_y = 0.5\n"
      "polarization_z = 0\n";
  CHECK_THROWS_AS(parse_config(text), Error);
}

TEST_CASE("scientific notation and comments parse") {
  auto cfg = parse_config(
      "# baseline block\n"
      "[material]\n"
      "Ms = 5.8e5   ; A/m\n"
      "Ku = 1.2e6\n");
  CHECK(cfg.num("material", "Ms") == 5.8e5);
  CHECK(cfg.num("material", "Ku") == 1.2e6);
}

TEST_CASE("parse then serialize then parse is a fixed point") {
  std::string text =
      "[material]\n"
      "Ms = 580e3\n"
      "Aex = 15e-12\n"
      "Dmi = 3.0e-3\n"
      "alpha = 0.1\n"
      "[drive]\n"
      "current_density = 0.2e12\n";
  auto cfg1 = parse_config(text);
  std::string canon1 = canonical_config(cfg1);
  auto cfg2 = parse_config(canon1);
  std::string canon2 = canonical_config(cfg2);
  CHECK(canon1 == canon2);
  CHECK(config_hash(cfg1) == config_hash(cfg2));
}

TEST_CASE("canonical form orders sections and keys deterministically") {
  auto cfg = parse_config("[output]\nsample_dt = 2e-11\n[material]\nMs = 600e3\n");
  std::string canon = canonical_config(cfg);
  CHECK(canon.find("[material]") < canon.find("[geometry]"));
  CHECK(canon.find("[geometry]") < canon.find("[drive]"));
  CHECK(canon.find("[transmon]") < canon.find("[output]"));
  size_t sec = canon.find("[material]");
  size_t aex = canon.find("Aex = ", sec);
  size_t ms = canon.find("Ms = ", sec);
  size_t alpha = canon.find("alpha = ", sec);
  CHECK(aex < ms);
  CHECK(ms < alpha);
}

TEST_CASE("duplicate keys are violations") {
  CHECK_THROWS_AS(parse_config("[material]\nMs = 1e5\nMs = 2e5\n"), Error);
}

TEST_CASE("float formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(580000.0) == "580000");
  CHECK(format_double(1.5e-11) == "1.5e-11");
  double x = 0.1 + 0.2;
  double y = 0;
  auto s = format_double(x);
  sscanf(s.c_str(), "%lf", &y);
  CHECK(x == y);
}
