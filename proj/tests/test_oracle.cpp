#include <doctest.h>

#include <cmath>
#include <random>

#include "coexsim/oracle.hpp"
#include "coexsim/srs.hpp"
#include "coexsim/units.hpp"
#include "helpers.hpp"

using namespace coexsim;
using coexsim::testing::SingleModeOpts;
using coexsim::testing::single_mode;

TEST_SUITE("oracle") {

TEST_CASE("coupled SRS solve") {
  SUBCASE("single channel decays purely exponentially") {
    SingleModeOpts o;
    o.channels = 2;
    o.quantum = 1;
    o.total_dbm = 15.0;
    Scenario s = validate(single_mode(o));
    SrsTrajectory tr = srs_coupled_solve(s, 5000, 2);
    double expect = s.launch.p_tx[0][0] * std::exp(-s.alpha[0][0] * 1e5);
    CHECK(tr.p.back()[0][0] == doctest::Approx(expect).epsilon(1e-9));
  }
  SUBCASE("antisymmetric coupling conserves total power without loss") {
    SingleModeOpts o;
    o.channels = 3;
    o.quantum = 1;
    o.total_dbm = 20.0;
    o.att_db_km = 1e-12;  // effectively lossless
    Scenario s = validate(single_mode(o));
    SrsTrajectory tr = srs_coupled_solve(s, 20000, 2);
    double start = s.launch.p_tx[0][0] + s.launch.p_tx[0][2];
    double end = tr.p.back()[0][0] + tr.p.back()[0][2];
    CHECK(end == doctest::Approx(start).epsilon(1e-9));
    // and the exchange is visible: the lower-frequency channel gained
    CHECK(tr.p.back()[0][0] > s.launch.p_tx[0][0]);
    CHECK(tr.p.back()[0][2] < s.launch.p_tx[0][2]);
  }
}

TEST_CASE("effective attenuation from a power profile") {
  double a = units::db_per_km_to_per_m(0.2);
  CHECK(effective_attenuation_from_profile(1.0, std::exp(-a * 5e4), 5e4) ==
        doctest::Approx(a).epsilon(1e-12));
  CHECK_THROWS_AS(effective_attenuation_from_profile(1.0, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(effective_attenuation_from_profile(0.0, 0.5, 1e4), std::domain_error);

  SUBCASE("tilted profiles agree with the closed-form effective loss") {
    SingleModeOpts o;
    o.channels = 8;
    o.f_min_thz = 193.0;
    o.quantum = 7;
    o.total_dbm = 25.0;
    Scenario s = validate(single_mode(o));
    TiltParams tilt = fit_tilt(s);
    REQUIRE(tilt.groups[0].active());
    const TiltTerm& t = tilt.groups[0].terms[0];
    SrsTrajectory tr = srs_coupled_solve(s, 20000, 2);
    for (int c = 0; c < 7; ++c) {
      double z = s.solver.span_length;
      double from_ode = effective_attenuation_from_profile(s.launch.p_tx[0][c],
                                                           tr.p.back()[0][c], z);
      double closed = effective_loss(s.alpha[0][c], t.c_r, t.f_r, s.grid.frequency(c),
                                     t.total_power, t.alpha0, z);
      // within the closed-form model error budget (0.1 dB over the span)
      CHECK(std::abs(from_ode - closed) * z < 0.1 * std::log(10.0) / 10.0);
    }
  }
}

TEST_CASE("efficiency quadrature closes on the analytic form for constant losses") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> da(-3e-4, -1e-6), db(-0.05, 0.05), zz(100.0, 5e3);
  for (int k = 0; k < 30; ++k) {
    Mismatch m{da(rng), db(rng)};
    double z = zz(rng);
    double quad = efficiency_numeric(m, z, 16384);
    double closed = efficiency_exact(m, z);
    CHECK(std::abs(quad - closed) <= 1e-9 * std::max(std::abs(closed), 1e-3));
  }
  CHECK(efficiency_numeric(Mismatch{-1e-4, 1e-3}, 0.0, 1000) == 0.0);
}

TEST_CASE("fine-step reference") {
  SUBCASE("no classical power, no interference") {
    SingleModeOpts o;
    o.total_dbm = std::nullopt;
    Scenario s = validate(single_mode(o));
    SolveResult r = fine_step_reference(s, 2000, 11);
    for (const auto& row : r.forward)
      for (double v : row) CHECK(v == 0.0);
  }
  SUBCASE("step doubling changes the endpoint by less than 0.01 dB") {
    SingleModeOpts o;
    o.channels = 5;
    o.f_min_thz = 195.7;
    o.quantum = 4;
    o.total_dbm = 10.0;
    Scenario s = validate(single_mode(o));
    SolveResult a = fine_step_reference(s, 100000, 3);
    SolveResult b = fine_step_reference(s, 200000, 3);
    int ta = a.index_of(0, 4), tb = b.index_of(0, 4);
    double delta = units::ratio_db(a.forward.back()[ta], b.forward.back()[tb]);
    CHECK(std::abs(delta) < 0.01);
  }
  SUBCASE("self-convergence of observed order at least three") {
    SingleModeOpts o;
    o.channels = 4;
    o.f_min_thz = 195.75;
    o.quantum = 3;
    o.total_dbm = 10.0;
    o.span_km = 50.0;
    Scenario s = validate(single_mode(o));
    double p1 = fine_step_reference(s, 400, 2).forward.back()[3];
    double p2 = fine_step_reference(s, 800, 2).forward.back()[3];
    double p4 = fine_step_reference(s, 1600, 2).forward.back()[3];
    double ref = fine_step_reference(s, 25600, 2).forward.back()[3];
    double e1 = std::abs(p1 - ref), e2 = std::abs(p2 - ref), e4 = std::abs(p4 - ref);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e2 / e4 >= 8.0);
  }
}

TEST_CASE("coherent FWM quadrature matches the closed form under static losses") {
  SingleModeOpts o;
  o.channels = 6;
  o.f_min_thz = 193.0;
  o.quantum = 5;
  o.total_dbm = 18.0;
  o.tilt = false;
  Scenario s = validate(single_mode(o));
  double quad = fwm_power_quadrature(s, 0, 5, 1e5, 20000);
  double closed = closed_form_fwm_power(s, 0, 5, 1e5, ChiKind::exact);
  CHECK(quad == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("SRS-aware averaged solve tracks the coherent quadrature at a hot band edge") {
  // small-grid version of the 30 dBm band-edge comparison; the no-tilt run
  // misses by far more, which is the whole point of the SRS-aware efficiency
  SingleModeOpts o;
  o.channels = 8;
  o.f_min_thz = 193.0;
  o.quantum = 0;
  o.total_dbm = 27.0;
  Scenario s = validate(single_mode(o));
  SourceToggles fwm_only{false, false, false, true};
  double p_avg = solve_forward(s, fwm_only).forward.back()[0];
  double p_quad = fwm_power_quadrature(s, 0, 0, 1e5, 20000);
  CHECK(std::abs(units::ratio_db(p_avg, p_quad)) < 0.5);

  SingleModeOpts of = o;
  of.tilt = false;
  Scenario sf = validate(single_mode(of));
  double p_flat = solve_forward(sf, fwm_only).forward.back()[0];
  CHECK(std::abs(units::ratio_db(p_flat, p_quad)) >
        std::abs(units::ratio_db(p_avg, p_quad)));
}

TEST_CASE("report formatting") {
  OracleReport r;
  r.rows.push_back({"P_int@z=100km", 1e-10, 1.05e-10, 5e-12, 0.05, 0.21});
  r.reference_steps = 1000000;
  r.target_steps = 100;
  CHECK(r.max_abs_delta_db() == doctest::Approx(0.21));
  CHECK(r.to_csv().find("P_int@z=100km") != std::string::npos);
  CHECK(r.summary(0.25).find("PASS") != std::string::npos);
  CHECK(r.summary(0.1).find("FAIL") != std::string::npos);
}

}  // TEST_SUITE
