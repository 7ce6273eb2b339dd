// Acceptance suite: exercises the headline model claims end to end and
// prints one pass/fail line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "coexsim/constants.hpp"
#include "coexsim/kinetics.hpp"
#include "coexsim/metrics.hpp"
#include "coexsim/oracle.hpp"
#include "coexsim/profiles.hpp"
#include "coexsim/srs.hpp"
#include "coexsim/units.hpp"

using namespace coexsim;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string scenario_path(const char* name) {
  return std::string(COEXSIM_SCENARIO_DIR) + "/" + name;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

char buf[512];

// 1. Nonlinear scaling factor against the tabulated 0.91.
void criterion_1() {
  double r = nonlinear_scaling_factor(2, 0.18);
  bool pass = std::abs(r - 0.9089) <= 0.005;
  std::snprintf(buf, sizeof(buf), "r(2, 0.18) = %.6f, expected 0.9089 +- 0.005", r);
  report(1, "nonlinear scaling factor", pass, buf);
}

// 2. Accuracy assessment: 10 channels, 10 dBm, 100-step averaged solve vs the
// 1e6-step exact reference, 0.25 dB at the span end, >= 100x faster.
void criterion_2() {
  Scenario s = validate(parse_scenario_file(scenario_path("accuracy_10ch_upper_band.json")));

  auto t0 = clock_type::now();
  SolveResult fast = solve_forward(s);
  double fast_s = seconds_since(t0);

  t0 = clock_type::now();
  SolveResult ref = fine_step_reference(s, 1000000, 101);
  double ref_s = seconds_since(t0);

  double p_fast = fast.forward.back()[fast.index_of(0, 9)];
  double p_ref = ref.forward.back()[ref.index_of(0, 9)];
  double delta = std::abs(units::ratio_db(p_fast, p_ref));
  double speedup = ref_s / fast_s;
  bool pass = delta <= 0.25 && speedup >= 100.0 && fast_s < 1.0;
  std::snprintf(buf, sizeof(buf),
                "endpoint delta = %.4f dB (tol 0.25), fast %.4f s, oracle %.1f s, speedup %.0fx",
                delta, fast_s, ref_s, speedup);
  report(2, "fast path vs fine-step oracle", pass, buf);
}

// 3. Averaged-chi closed form brackets and tracks the exact-chi closed form.
void criterion_3() {
  Scenario s = parse_scenario_file(scenario_path("single_mode_full_band.json"));
  s.grid.quantum_channel = 44;  // center of the allocated spectrum
  s = validate(s);

  bool bracket_ok = true;
  for (int k = 0; k <= 500; ++k) {
    double z = 1e5 * k / 500.0;
    double lo = closed_form_fwm_power(s, 0, 44, z, ChiKind::lower);
    double hi = closed_form_fwm_power(s, 0, 44, z, ChiKind::upper);
    double avg = closed_form_fwm_power(s, 0, 44, z, ChiKind::averaged);
    double slack = 1e-12 * hi + 1e-30;
    if (avg < lo - slack || avg > hi + slack) bracket_ok = false;
  }
  double avg_end = closed_form_fwm_power(s, 0, 44, 1e5, ChiKind::averaged);
  double exact_end = closed_form_fwm_power(s, 0, 44, 1e5, ChiKind::exact);
  double delta = std::abs(units::ratio_db(avg_end, exact_end));
  bool pass = bracket_ok && delta <= 0.1;
  std::snprintf(buf, sizeof(buf), "bracket %s, endpoint delta = %.4f dB (tol 0.1)",
                bracket_ok ? "held" : "violated", delta);
  report(3, "FWM averaging against envelopes", pass, buf);
}

// 4. Exact efficiency equals the quadrature oracle for constant losses.
void criterion_4() {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> da(-3e-4, -1e-6), db(-0.05, 0.05), zz(100.0, 5e3);
  auto t0 = clock_type::now();
  double worst = 0.0;
  double min_scale = 1e300;
  for (int k = 0; k < 1000; ++k) {
    Mismatch m{da(rng), db(rng)};
    double z = zz(rng);
    double closed = efficiency_exact(m, z);
    double quad = efficiency_numeric(m, z, 16384);
    double scale = std::max(std::abs(closed), 1e-3);
    min_scale = std::min(min_scale, std::abs(closed));
    worst = std::max(worst, std::abs(quad - closed) / scale);
  }
  bool pass = worst <= 1e-9;
  std::snprintf(buf, sizeof(buf), "1000 cases, worst relative error %.2e (tol 1e-9), %.1f s",
                worst, seconds_since(t0));
  report(4, "FWM efficiency closure", pass, buf);
}

// 5. Closed-form SRS profiles vs the coupled-ODE oracle across all channels.
void criterion_5() {
  Scenario s = validate(parse_scenario_file(scenario_path("single_mode_full_band.json")));
  TiltParams tilt = fit_tilt(s);
  auto t0 = clock_type::now();
  SrsTrajectory tr = srs_coupled_solve(s, 100000, 2);
  double oracle_s = seconds_since(t0);
  double worst = 0.0;
  for (int c = 0; c < s.grid.count; ++c) {
    if (s.launch.p_tx[0][c] <= 0.0) continue;
    double closed = signal_profile(s, tilt, 0, c, s.solver.span_length);
    double delta = std::abs(units::ratio_db(closed, tr.p.back()[0][c]));
    worst = std::max(worst, delta);
  }
  bool pass = worst <= 0.1 && oracle_s < 60.0;
  std::snprintf(buf, sizeof(buf), "worst per-channel delta = %.4f dB (tol 0.1), oracle %.1f s",
                worst, oracle_s);
  report(5, "SRS tilt closed form", pass, buf);
}

// 6. SRS-aware averaged FWM vs the coherent quadrature at 30 dBm band edges;
// the no-SRS curve must deviate by more.
void criterion_6() {
  double worst_srs = 0.0, best_nosrs = 1e300;
  for (int edge : {0, 87}) {
    Scenario s = parse_scenario_file(scenario_path("single_mode_full_band.json"));
    s.launch.total_dbm[0] = 30.0;
    s.grid.quantum_channel = edge;
    s = validate(s);

    SourceToggles fwm_only{false, false, false, true};
    SolveResult approx = solve_forward(s, fwm_only);
    double p_approx = approx.forward.back()[approx.index_of(0, edge)];
    double p_quad = fwm_power_quadrature(s, 0, edge, s.solver.span_length, 50000);

    Scenario s_flat = s;
    s_flat.solver.tilt = false;
    s_flat = validate(s_flat);
    SolveResult flat = solve_forward(s_flat, fwm_only);
    double p_flat = flat.forward.back()[flat.index_of(0, edge)];

    worst_srs = std::max(worst_srs, std::abs(units::ratio_db(p_approx, p_quad)));
    best_nosrs = std::min(best_nosrs, std::abs(units::ratio_db(p_flat, p_quad)));
  }
  bool pass = worst_srs <= 1.0 && best_nosrs > 1.0;
  std::snprintf(buf, sizeof(buf),
                "SRS-aware delta = %.3f dB (tol 1.0), no-SRS delta = %.3f dB (must exceed 1.0)",
                worst_srs, best_nosrs);
  report(6, "FWM under SRS tilt", pass, buf);
}

// 7. Dedicated mode group isolation is about 40 dB.
void criterion_7() {
  Scenario sm = validate(parse_scenario_file(scenario_path("single_mode_full_band.json")));
  Scenario sdm = validate(parse_scenario_file(scenario_path("sdm_co_propagating.json")));
  SolveResult r_sm = solve_forward(sm);
  SolveResult r_sdm = solve_forward(sdm);
  double p_sm = r_sm.forward.back()[r_sm.index_of(0, 87)];
  double p_sdm = r_sdm.forward.back()[r_sdm.index_of(1, 87)];
  double isolation = units::ratio_db(p_sm, p_sdm);
  bool pass = isolation >= 35.0 && isolation <= 45.0;
  std::snprintf(buf, sizeof(buf), "isolation = %.2f dB (expected 40 +- 5)", isolation);
  report(7, "SDM mode-group isolation", pass, buf);
}

// 8. Counter-propagation: saturation with span length, the notch benefit, and
// the co/counter crossing beyond 80 km.
void criterion_8() {
  auto backward_at = [&](const char* file, double span_km) {
    Scenario s = parse_scenario_file(scenario_path(file));
    s.solver.span_length = units::km_to_m(span_km);
    s = validate(s);
    SolveResult r = solve_counter(s);
    return r.backward[0][r.index_of(1, 87)];
  };
  auto co_at = [&](double span_km) {
    Scenario s = parse_scenario_file(scenario_path("sdm_co_propagating.json"));
    s.solver.span_length = units::km_to_m(span_km);
    s = validate(s);
    SolveResult r = solve_forward(s);
    return r.forward.back()[r.index_of(1, 87)];
  };

  double b80 = backward_at("sdm_counter_propagating.json", 80.0);
  double b100 = backward_at("sdm_counter_propagating.json", 100.0);
  double increment = (b100 - b80) / b80;
  // the tilt reference is refit per span length, so the increment can sit a
  // fraction of a percent below zero once the accumulation has saturated
  bool saturates = increment < 0.10 && increment > -0.05;

  double nn100 = backward_at("sdm_counter_no_notch.json", 100.0);
  double notch_gain = units::ratio_db(nn100, b100);
  bool notch_ok = notch_gain >= 25.0 && notch_gain <= 35.0;

  double co80 = co_at(80.0);
  bool no_cross_at_80 = co80 > b80;
  double crossing = -1.0;
  double prev_co = co80, prev_b = b80;
  for (double L = 90.0; L <= 200.0; L += 10.0) {
    double co = co_at(L), b = backward_at("sdm_counter_propagating.json", L);
    if (prev_co > prev_b && co <= b) {
      crossing = L;
      break;
    }
    prev_co = co;
    prev_b = b;
  }
  bool crossing_ok = no_cross_at_80 && crossing > 80.0;

  bool pass = saturates && notch_ok && crossing_ok;
  std::snprintf(buf, sizeof(buf),
                "80->100 km increment = %.1f%% (tol <10%%), no-notch excess = %.1f dB "
                "(expected 30 +- 5), crossing near %.0f km (> 80)",
                increment * 100.0, notch_gain, crossing);
  report(8, "counter-propagation behavior", pass, buf);
}

// 9. Property suite: the always-on invariants.
void criterion_9() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failures.emplace_back(what);
  };

  {  // envelope sandwich
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> da(-3e-4, -1e-6), db(-0.05, 0.05), zz(0.0, 2e5);
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      Mismatch m{da(rng), db(rng)};
      ChiSet c = chi_and_envelopes(m, zz(rng));
      if (c.chi < c.chi_min - 1e-12 || c.chi > c.chi_max + 1e-12) ok = false;
    }
    expect(ok, "envelope sandwich");
  }

  Scenario base = parse_scenario_file(scenario_path("accuracy_10ch_upper_band.json"));
  {  // cubic FWM and linear SpRS scaling
    Scenario a = base, b = base;
    a.solver.tilt = false;
    b.solver.tilt = false;
    b.launch.total_dbm[0] = *base.launch.total_dbm[0] + 10.0 * std::log10(2.0);
    Scenario va = validate(a), vb = validate(b);
    SourceToggles fwm_only{false, false, false, true};
    SourceToggles sprs_only{true, false, false, false};
    double fa = solve_forward(va, fwm_only).forward.back()[0];
    double fb = solve_forward(vb, fwm_only).forward.back()[0];
    expect(std::abs(fb / fa - 8.0) < 1e-6, "cubic FWM power scaling");
    double sa = solve_forward(va, sprs_only).forward.back()[0];
    double sb = solve_forward(vb, sprs_only).forward.back()[0];
    expect(std::abs(sb / sa - 2.0) < 1e-6, "linear SpRS scaling");
  }

  {  // QBER monotonicity and bounds
    bool ok = true;
    double prev = -1.0;
    for (double p = 0.0; p <= 1e-12; p += 1e-14) {
      double q = qber(1e6, p, 193e12);
      if (q < 0.0 || q >= 1.0 || q <= prev - 1e-18) ok = false;
      prev = q;
    }
    expect(ok, "QBER monotone and bounded");
  }

  {  // Stokes/anti-Stokes asymmetry
    RamanGainModel lin;
    lin.slope = units::raman_slope_to_si(0.0286);
    double eta_s = raman_cross_section(193e12, 194e12, 300.0, 5e10, lin);
    double eta_a = raman_cross_section(193e12, 192e12, 300.0, 5e10, lin);
    double expected = kPlanck * 193e12 * 5e10 * lin.at(1e12);
    expect(std::abs((eta_s - eta_a) / expected - 1.0) < 1e-12, "Stokes/anti-Stokes asymmetry");
  }

  {  // determinism
    Scenario s = validate(base);
    SolveResult r1 = solve_forward(s);
    SolveResult r2 = solve_forward(s);
    bool ok = r1.z == r2.z && r1.forward == r2.forward;
    expect(ok, "bit-identical reruns");
  }

  {  // source breakdown summation
    Scenario s = parse_scenario_file(scenario_path("sdm_counter_propagating.json"));
    s.solver.span_length = units::km_to_m(60.0);
    s = validate(s);
    SolveResult total = solve_counter(s);
    SolveResult parts[4] = {solve_counter(s, {true, false, false, false}),
                            solve_counter(s, {false, true, false, false}),
                            solve_counter(s, {false, false, true, false}),
                            solve_counter(s, {false, false, false, true})};
    bool ok = true;
    for (std::size_t k = 0; k < total.z.size(); ++k)
      for (std::size_t t = 0; t < total.tracked.size(); ++t) {
        double sf = 0.0, sb = 0.0;
        for (auto& p : parts) {
          sf += p.forward[k][t];
          sb += p.backward[k][t];
        }
        if (std::abs(sf - total.forward[k][t]) > 1e-9 * std::max(total.forward[k][t], 1e-300))
          ok = false;
        if (std::abs(sb - total.backward[k][t]) > 1e-9 * std::max(total.backward[k][t], 1e-300))
          ok = false;
      }
    expect(ok, "source breakdown summation");
  }

  std::string detail;
  if (failures.empty()) {
    detail = "envelope sandwich, scaling laws, QBER bounds, eta asymmetry, determinism, "
             "breakdown identity";
  } else {
    detail = "failed:";
    for (auto& f : failures) detail += " " + f + ";";
  }
  report(9, "property suites", failures.empty(), detail);
}

}  // namespace

int main() {
  auto t0 = clock_type::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("acceptance finished in %.1f s: %d failure(s)\n", seconds_since(t0), g_failures);
  return g_failures == 0 ? 0 : 1;
}
