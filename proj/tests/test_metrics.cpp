#include <doctest.h>

#include <cmath>

#include "coexsim/constants.hpp"
#include "coexsim/metrics.hpp"
#include "coexsim/units.hpp"
#include "helpers.hpp"

using namespace coexsim;

TEST_SUITE("metrics") {

TEST_CASE("psd") {
  CHECK(psd(1e-12, 50e9) == doctest::Approx(2e-23).epsilon(1e-13));
  CHECK(units::w_per_hz_to_mw_per_ghz(psd(1e-12, 50e9)) == doctest::Approx(2e-11).epsilon(1e-13));
  CHECK(psd(0.0, 50e9) == 0.0);
  CHECK_THROWS_AS(psd(1e-12, 0.0), std::domain_error);
  // the CV-QKD feasibility scale is expressible
  double p = 1e-7 / 1e12 * 50e9;  // 1e-7 mW/GHz over a 50 GHz slot
  CHECK(units::w_per_hz_to_mw_per_ghz(psd(p, 50e9)) == doctest::Approx(1e-7).epsilon(1e-12));
  SUBCASE("psd times bandwidth returns the power exactly") {
    for (double p2 : {1e-15, 3.7e-11, 2e-9}) CHECK(psd(p2, 50e9) * 50e9 == doctest::Approx(p2).epsilon(1e-15));
  }
}

TEST_CASE("qber") {
  double f = 193e12;
  CHECK(qber(1e6, 0.0, f) == 0.0);
  double p_half = 1e6 * kPlanck * f;
  CHECK(qber(1e6, p_half, f) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(qber(1e18, 1e-15, f) < 1e-5);  // strong signal limit
  CHECK_THROWS_AS(qber(0.0, 0.0, f), std::domain_error);
  CHECK_THROWS_AS(qber(-1.0, 1e-12, f), std::domain_error);

  SUBCASE("monotone in interference, bounded in [0, 1)") {
    double prev = -1.0;
    for (double p = 0.0; p < 1e-12; p += 5e-14) {
      double q = qber(1e6, p, f);
      CHECK(q >= 0.0);
      CHECK(q < 1.0);
      CHECK(q > prev);
      prev = q;
    }
    // and decreasing in the signal rate
    CHECK(qber(2e6, 1e-13, f) < qber(1e6, 1e-13, f));
  }
}

TEST_CASE("excess noise in shot-noise units") {
  CHECK(excess_noise_snu(0.0, 1e-9) == 0.0);
  CHECK(excess_noise_snu(1e-9, 1e-9) == doctest::Approx(1.0));
  CHECK(excess_noise_snu(1e-9, 0.5e-9) == doctest::Approx(2.0));  // halving sigma^2 doubles xi
  CHECK_THROWS_AS(excess_noise_snu(1e-9, 0.0), std::domain_error);
}

TEST_CASE("metric assembly for a scenario") {
  auto o = coexsim::testing::SingleModeOpts{};
  Scenario s = coexsim::testing::single_mode(o);
  s.receiver = ReceiverSpec{1e6, 0.0, 1.0, 1e-9};  // detector bandwidth defaults to B_s
  s = validate(s);
  MetricSet m = compute_metrics(s, 2e-12);
  CHECK(m.psd_w_per_hz == doctest::Approx(2e-12 / 5e10));
  CHECK(m.has_qber);
  CHECK(m.has_xi);
  CHECK(m.xi_snu == doctest::Approx(2e-3));
  CHECK(m.qber > 0.0);
  CHECK(m.qber < 1.0);

  SUBCASE("detector bandwidth and efficiency are overridable") {
    Scenario s2 = s;
    s2.receiver->detector_bandwidth = 2.5e10;  // half the slot
    Scenario v2 = validate(s2);
    MetricSet m2 = compute_metrics(v2, 2e-12);
    CHECK(m2.qber < m.qber);
    s2.receiver->detector_bandwidth = 0.0;
    s2.receiver->detector_efficiency = 0.5;
    MetricSet m3 = compute_metrics(validate(s2), 2e-12);
    CHECK(m3.qber < m.qber);
  }
}

}  // TEST_SUITE
