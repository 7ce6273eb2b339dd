#include <benchmark/benchmark.h>

#include <string>

#include "coexsim/fwm.hpp"
#include "coexsim/kinetics.hpp"
#include "coexsim/oracle.hpp"
#include "coexsim/srs.hpp"

using namespace coexsim;

namespace {

Scenario load(const char* name) {
  return validate(parse_scenario_file(std::string(COEXSIM_SCENARIO_DIR) + "/" + name));
}

}  // namespace

// Full C-band target-channel solve, the paper-style fast path.
static void BM_SolveForwardFullBand(benchmark::State& state) {
  Scenario s = load("single_mode_full_band.json");
  for (auto _ : state) {
    SolveResult r = solve_forward(s);
    benchmark::DoNotOptimize(r.forward.back()[0]);
  }
}
BENCHMARK(BM_SolveForwardFullBand)->Unit(benchmark::kMillisecond);

static void BM_SolveCounterSdm(benchmark::State& state) {
  Scenario s = load("sdm_counter_propagating.json");
  for (auto _ : state) {
    SolveResult r = solve_counter(s);
    benchmark::DoNotOptimize(r.backward.front()[0]);
  }
}
BENCHMARK(BM_SolveCounterSdm)->Unit(benchmark::kMillisecond);

static void BM_EfficiencyExact(benchmark::State& state) {
  Mismatch m{-9.21e-5, 2.14e-3};
  double z = 0.0;
  for (auto _ : state) {
    z += 1.0;
    benchmark::DoNotOptimize(efficiency_exact(m, z));
  }
}
BENCHMARK(BM_EfficiencyExact);

static void BM_EfficiencyAveraged(benchmark::State& state) {
  Mismatch m{-9.21e-5, 2.14e-3};
  for (auto _ : state) benchmark::DoNotOptimize(efficiency_averaged(m));
}
BENCHMARK(BM_EfficiencyAveraged);

static void BM_ClosedFormFwm(benchmark::State& state) {
  Scenario s = load("single_mode_full_band.json");
  for (auto _ : state)
    benchmark::DoNotOptimize(closed_form_fwm_power(s, 0, 44, 1e5, ChiKind::averaged));
}
BENCHMARK(BM_ClosedFormFwm)->Unit(benchmark::kMillisecond);

static void BM_TripleEnumeration(benchmark::State& state) {
  Scenario s = load("single_mode_full_band.json");
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_triples(s.grid, 0, 44).size());
}
BENCHMARK(BM_TripleEnumeration)->Unit(benchmark::kMicrosecond);

static void BM_SrsCoupledOracle(benchmark::State& state) {
  Scenario s = load("accuracy_10ch_upper_band.json");
  long steps = state.range(0);
  for (auto _ : state) {
    SrsTrajectory t = srs_coupled_solve(s, steps, 2);
    benchmark::DoNotOptimize(t.p.back()[0][0]);
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_SrsCoupledOracle)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_TiltFit(benchmark::State& state) {
  Scenario s = load("single_mode_full_band.json");
  for (auto _ : state) {
    TiltParams t = fit_tilt(s);
    benchmark::DoNotOptimize(t.groups[0].alpha0);
  }
}
BENCHMARK(BM_TiltFit)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
