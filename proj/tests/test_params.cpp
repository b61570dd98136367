#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "riscov/params.hpp"

using namespace riscov;

TEST_CASE("derive_alpha matches the intercept law") {
  CHECK(derive_alpha(1e9) == doctest::Approx(-2.8).epsilon(1e-12));
  CHECK(derive_alpha(28e9) == doctest::Approx(-5.694316062684438).epsilon(1e-12));
  CHECK(derive_alpha(10e9) == doctest::Approx(-4.8).epsilon(1e-12));
  CHECK_THROWS_AS(derive_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS(derive_alpha(-1.0), std::invalid_argument);
}

TEST_CASE("derive_alpha is strictly decreasing in frequency") {
  double prev = derive_alpha(0.5e9);
  for (double f = 1e9; f <= 2e11; f *= 1.7) {
    double a = derive_alpha(f);
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("thermal noise and derived defaults") {
  CHECK(thermal_noise_w(200e6) == doctest::Approx(8.0077642e-13).epsilon(1e-6));
  CHECK(default_beamwidth(64) == doctest::Approx(2.0 * kPi / 8.0));
  SystemParams p;
  CHECK(p.alpha == doctest::Approx(derive_alpha(p.fc_hz)).epsilon(1e-15));
  CHECK(p.mean_len() == doctest::Approx(15.0));
  CHECK(p.los_decay_rate() == doctest::Approx(2.0 * 1.59e-3 * 15.0 / kPi).epsilon(1e-12));
}

TEST_CASE("validate accepts the defaults and reports every violation") {
  SystemParams p;
  CHECK(validate(p).empty());

  SUBCASE("beta must exceed 2") {
    p.beta = 1.9;
    auto errs = validate(p);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("beta") != std::string::npos);
  }
  SUBCASE("length bounds ordered") {
    p.len_min = 20.0;
    p.len_max = 10.0;
    auto errs = validate(p);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("len_min") != std::string::npos);
  }
  SUBCASE("multiple violations are all reported") {
    p.beta = 1.5;
    p.lambda_b = -1.0;
    p.n_ris = 0;
    CHECK(validate(p).size() == 3);
  }
  SUBCASE("beamwidth domain is (0, 2pi]") {
    p.psi_ue = 2.0 * kPi;
    CHECK(validate(p).empty());
    p.psi_ue = 2.0 * kPi + 0.1;
    CHECK(validate(p).size() == 1);
    p.psi_ue = 0.0;
    CHECK(validate(p).size() == 1);
  }
  SUBCASE("multi-cell needs blockage decay or an explicit truncation radius") {
    p.scenario = MultiCell{1e-5};
    p.lambda_b = 0.0;
    CHECK(validate(p).size() == 1);
    p.trunc_radius = 2000.0;
    CHECK(validate(p).empty());
  }
  SUBCASE("checked throws with all messages joined") {
    p.beta = 0.0;
    p.p0_w = 0.0;
    CHECK_THROWS_AS(checked(p), std::invalid_argument);
  }
}

TEST_CASE("virtual radius derivations") {
  SystemParams p;
  CHECK(p.virtual_radius() == doctest::Approx(100.0));
  p.scenario = MultiCell{7.957747154594767e-6};
  CHECK(p.virtual_radius() == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(p.sim_radius() == doctest::Approx(1000.0));  // max(6/c, 5 r_v)
  p.r_sim = 700.0;
  CHECK(p.sim_radius() == doctest::Approx(700.0));
}

TEST_CASE("json round-trip is bitwise for every numeric field") {
  SystemParams p;
  p.fc_hz = 73e9;
  p.alpha = derive_alpha(p.fc_hz) * 1.000000001;  // deliberately off-derivation
  p.lambda_b = 1.91e-3;
  p.len_min = 11.5;
  p.psi_ue = 1.234567890123456;
  p.scenario = MultiCell{5.0921e-6};
  SystemParams q = params_from_json(params_to_json(p));
  CHECK(q.fc_hz == p.fc_hz);
  CHECK(q.alpha == p.alpha);
  CHECK(q.beta == p.beta);
  CHECK(q.lambda_b == p.lambda_b);
  CHECK(q.len_min == p.len_min);
  CHECK(q.len_max == p.len_max);
  CHECK(q.lambda_r == p.lambda_r);
  CHECK(q.lambda_u == p.lambda_u);
  CHECK(q.n_bs == p.n_bs);
  CHECK(q.n_ris == p.n_ris);
  CHECK(q.n_ue == p.n_ue);
  CHECK(q.psi_bs == p.psi_bs);
  CHECK(q.psi_ris == p.psi_ris);
  CHECK(q.psi_ue == p.psi_ue);
  CHECK(q.p0_w == p.p0_w);
  CHECK(q.noise_w == p.noise_w);
  CHECK(q.bw_hz == p.bw_hz);
  CHECK(q.eps_int == p.eps_int);
  CHECK(q.bs_density() == p.bs_density());
}

TEST_CASE("json defaults: derived fields recomputed unless overridden") {
  nlohmann::json j;
  j["fc_hz"] = 60e9;
  j["n_bs"] = 16;
  SystemParams p = params_from_json(j);
  CHECK(p.alpha == doctest::Approx(derive_alpha(60e9)).epsilon(1e-15));
  CHECK(p.psi_bs == doctest::Approx(default_beamwidth(16)).epsilon(1e-15));

  j["alpha"] = -5.6;
  j["psi_bs"] = 0.3;
  p = params_from_json(j);
  CHECK(p.alpha == -5.6);
  CHECK(p.psi_bs == 0.3);

  nlohmann::json s;
  s["scenario"] = {{"type", "multi_cell"}, {"r_v_m", 200.0}};
  p = params_from_json(s);
  CHECK(!p.is_single_cell());
  CHECK(p.bs_density() == doctest::Approx(1.0 / (kPi * 200.0 * 200.0)).epsilon(1e-12));
}
