#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coexsim/fwm.hpp"
#include "coexsim/scenario.hpp"
#include "coexsim/srs.hpp"

namespace coexsim {

// Signal-driven source injections. Couplings of the interference itself
// (kappa, eta, Gamma acting on accumulated noise) stay active regardless, so
// per-source indicator runs superpose exactly to the full solution.
struct SourceToggles {
  bool sprs = true;
  bool crosstalk = true;
  bool rayleigh = true;
  bool fwm = true;
};

struct TrackedChannel {
  int group = 0;
  int channel = 0;
  bool operator==(const TrackedChannel&) const = default;
};

struct SolveResult {
  std::vector<double> z;                       // m, ascending 0..L_s
  std::vector<TrackedChannel> tracked;
  std::vector<std::vector<double>> forward;    // [sample][tracked], W
  std::vector<std::vector<double>> backward;   // counter scheme only, value at z[sample]
  bool classical_backward = false;  // link was mirrored; z counts from the classical Tx
  std::uint64_t clamp_count = 0;
  std::uint64_t settings = 0;

  int index_of(int group, int channel) const;
  double quantum_endpoint(const Scenario& spec) const;  // forward at L_s, or backward at z=0
};

// Full interference power ODE right-hand side (W/m) for channel (group, i) at
// z, evaluated against a dense interference state p_int[group][channel].
double interference_rate(const Scenario& spec, const TiltParams& tilt,
                         const std::vector<std::vector<double>>& p_int, int group, int channel,
                         double z, const SourceToggles& toggles = {});

// Co-propagating solve: fixed-step RK4 over [0, L_s], initial interference
// zero (plus the FWM input condition in averaged mode).
SolveResult solve_forward(const Scenario& spec, const SourceToggles& toggles = {});

// Counter-propagating two-pass solve: forward interference first, then the
// backward equation integrated in the backward travel coordinate with the
// forward results as frozen sources. Requires scheme = counter and a
// unidirectional classical load.
SolveResult solve_counter(const Scenario& spec, const SourceToggles& toggles = {});

// Classic 4-stage Runge-Kutta step; negative intermediate powers are clamped
// to zero (counted), non-finite derivatives abort with the location.
using RateFn = std::function<void(double z, const std::vector<double>& y, std::vector<double>& dydz)>;
std::vector<double> rk4_step(const RateFn& rhs, const std::vector<double>& y, double z, double dz,
                             std::uint64_t* clamp_count = nullptr);

// Tracked-channel set for the scenario's track mode: the quantum slot alone
// for single-group links; in SDM, every channel of the quantum group plus the
// quantum slot of each classical group. Full-grid mode tracks everything.
std::vector<TrackedChannel> tracked_channels(const Scenario& spec);

}  // namespace coexsim
