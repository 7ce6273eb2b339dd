#pragma once

#include <optional>

#include "coexsim/scenario.hpp"
#include "coexsim/units.hpp"

namespace coexsim::testing {

struct SingleModeOpts {
  int channels = 10;
  double f_min_thz = 195.5;
  double spacing_ghz = 50.0;
  int quantum = 9;
  std::optional<double> total_dbm = 10.0;  // nullopt: no classical power
  double att_db_km = 0.2;                  // constant attenuation
  double rayleigh_per_km = 1e-4;
  double kurtosis = -1.0;
  int guard = 0;
  bool tilt = true;
  int steps = 100;
  double span_km = 100.0;
  FwmEfficiencyMode fwm = FwmEfficiencyMode::averaged;
  TrackMode track = TrackMode::target_channel;
  Scheme scheme = Scheme::co;
};

inline Scenario single_mode(const SingleModeOpts& o) {
  Scenario s;
  s.name = "test-single-mode";
  s.scheme = o.scheme;
  s.grid.f_min = units::thz_to_hz(o.f_min_thz);
  s.grid.spacing = units::ghz_to_hz(o.spacing_ghz);
  s.grid.count = o.channels;
  s.grid.quantum_group = 0;
  s.grid.quantum_channel = o.quantum;
  s.grid.guard_channels = o.guard;

  ModeGroupSpec g;
  g.name = "smf";
  g.degenerate_modes = 2;
  g.gamma = units::per_w_km_to_per_w_m(1.3);
  g.raman_fraction = 0.18;
  g.beta2 = units::ps2_per_km_to_si(-21.7);
  g.attenuation = SpectralProfile::constant(units::db_per_km_to_per_m(o.att_db_km));
  g.raman_gain.slope = units::raman_slope_to_si(0.0286);
  g.raman_gain.peak = units::per_w_km_to_per_w_m(0.4);
  g.rayleigh = SpectralProfile::constant(units::per_km_to_per_m(o.rayleigh_per_km));
  g.kurtosis.assign(o.channels, o.kurtosis);
  s.groups.push_back(g);

  s.launch.temperature = 300.0;
  s.launch.total_dbm = {o.total_dbm};
  s.launch.per_channel_dbm = {std::nullopt};
  s.launch.direction = {Direction::forward};

  s.solver.steps_per_span = o.steps;
  s.solver.span_length = units::km_to_m(o.span_km);
  s.solver.fwm_mode = o.fwm;
  s.solver.track_mode = o.track;
  s.solver.tilt = o.tilt;
  s.solver.n_r = 3;
  return s;
}

struct SdmOpts {
  int channels = 16;
  double f_min_thz = 193.0;
  double spacing_ghz = 50.0;
  int quantum = 15;  // in group 1
  double total_dbm = 25.0;
  double crosstalk_db_km = -60.0;
  bool notch = true;
  bool tilt = true;
  int steps = 100;
  double span_km = 100.0;
  Scheme scheme = Scheme::co;
  TrackMode track = TrackMode::target_channel;
  bool img_terms = false;
  std::optional<double> a_eff_um2;        // enables img machinery
  std::optional<double> a_eff_cross_um2;
  std::optional<double> fwm_overlap;
};

inline Scenario sdm_pair(const SdmOpts& o) {
  Scenario s;
  s.name = "test-sdm";
  s.scheme = o.scheme;
  s.grid.f_min = units::thz_to_hz(o.f_min_thz);
  s.grid.spacing = units::ghz_to_hz(o.spacing_ghz);
  s.grid.count = o.channels;
  s.grid.quantum_group = 1;
  s.grid.quantum_channel = o.quantum;
  s.grid.notch = o.notch;

  for (int gi = 0; gi < 2; ++gi) {
    ModeGroupSpec g;
    g.name = gi == 0 ? "classical" : "quantum";
    g.degenerate_modes = 2;
    g.gamma = units::per_w_km_to_per_w_m(1.3);
    g.raman_fraction = 0.18;
    g.beta2 = units::ps2_per_km_to_si(-21.7);
    g.attenuation = SpectralProfile::constant(units::db_per_km_to_per_m(0.2));
    g.raman_gain.slope = units::raman_slope_to_si(0.0286);
    g.raman_gain.peak = units::per_w_km_to_per_w_m(0.4);
    g.rayleigh = SpectralProfile::constant(units::per_km_to_per_m(1e-4));
    g.kurtosis.assign(o.channels, gi == 0 ? -1.0 : 0.0);
    if (o.a_eff_um2) g.a_eff = units::um2_to_m2(*o.a_eff_um2);
    s.groups.push_back(g);
  }

  for (int a = 0; a < 2; ++a) {
    CouplingSpec::Pair p;
    p.to_group = a;
    p.from_group = 1 - a;
    p.kappa = SpectralProfile::constant(units::crosstalk_db_per_km_to_per_m(o.crosstalk_db_km));
    if (o.a_eff_cross_um2) p.a_eff_cross = units::um2_to_m2(*o.a_eff_cross_um2);
    if (o.fwm_overlap) p.fwm_overlap = *o.fwm_overlap;
    s.coupling.pairs.push_back(p);
  }

  s.launch.temperature = 300.0;
  s.launch.total_dbm = {o.total_dbm, std::nullopt};
  s.launch.per_channel_dbm = {std::nullopt, std::nullopt};
  s.launch.direction = {Direction::forward, Direction::forward};

  s.solver.steps_per_span = o.steps;
  s.solver.span_length = units::km_to_m(o.span_km);
  s.solver.fwm_mode = FwmEfficiencyMode::averaged;
  s.solver.track_mode = o.track;
  s.solver.tilt = o.tilt;
  s.solver.n_r = 3;
  s.solver.img_terms = o.img_terms;
  return s;
}

}  // namespace coexsim::testing
