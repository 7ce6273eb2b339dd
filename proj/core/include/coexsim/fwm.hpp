#pragma once

#include <vector>

#include "coexsim/scenario.hpp"
#include "coexsim/srs.hpp"

namespace coexsim {

// One term of the FWM sum onto target channel i: indices satisfy
// h - k + l = i on the uniform grid; the degenerate family has l = h.
struct FwmTriple {
  int h = 0, k = 0, l = 0;
  bool degenerate = false;
};

// Every allocated triple feeding channel i of the group, degenerate family
// first, deterministic ascending order.
std::vector<FwmTriple> enumerate_triples(const ChannelGrid& grid, int group, int target);

struct Mismatch {
  double delta_alpha = 0.0;  // 1/m, alpha_i - alpha_h - alpha_k - alpha_l
  double delta_beta = 0.0;   // rad/m
};

// Second-order Taylor expansion of the propagation constants:
// 2 pi^2 beta2 (f_i^2 - f_h^2 + f_k^2 - f_l^2).
double phase_mismatch(double beta2, double f_i, double f_h, double f_k, double f_l);
double loss_mismatch(double alpha_i, double alpha_h, double alpha_k, double alpha_l);

// Oscillatory efficiency factor 2 Re[(1 - e^{-(da/2 + j db) z}) / (da/2 + j db)].
// Works unchanged with a z-dependent effective delta-alpha substituted.
double efficiency_exact(const Mismatch& m, double z);

// Averaged factor 4 da / (da^2 + 4 db^2), z-independent. Negative whenever
// delta_alpha < 0: accumulation is only correct together with the nonzero
// input condition below. Throws when both mismatches vanish.
double efficiency_averaged(const Mismatch& m);

struct ChiSet {
  double chi = 0.0;      // e^{da z} - 2 e^{da z/2} cos(db z) + 1
  double chi_max = 0.0;  // cos = -1 envelope
  double chi_min = 0.0;  // cos = +1 envelope
  double chi_avg = 0.0;  // e^{da z} + 1
};
ChiSet chi_and_envelopes(const Mismatch& m, double z);

enum class ChiKind { exact, averaged, upper, lower };

// Closed-form accumulated FWM power at z under static attenuation,
// 4 r^2 g^2 / D^2 e^{-a_i z} sum chi / (da^2 + 4 db^2) over triples.
double closed_form_fwm_power(const Scenario& spec, int group, int target, double z, ChiKind kind);

// FWM interference present at z = 0 when solving with the averaged
// efficiency (chi_avg(0) = 2); zero in exact mode. Pass the tilt params to
// evaluate the mismatches at their z -> 0 effective-loss limit.
double fwm_input_condition(const Scenario& spec, const TiltParams* tilt, int group, int target,
                           bool use_average);

// Effective per-channel loss coefficient at z (averaged over [0, z]); equals
// the static alpha for untilted groups. This is the exponent-reconstruction
// form: alpha_tilde(z) z is the accumulated loss exponent.
double alpha_tilde(const Scenario& spec, const TiltParams& tilt, int group, int channel, double z);

// Local (instantaneous) effective loss rate alpha - c_R (f_R - f) P_T e^{-a0 z},
// the linear coefficient of the interference rate equation.
double alpha_local(const Scenario& spec, const TiltParams& tilt, int group, int channel, double z);

// Mismatch of a triple: static, with the z-averaged effective losses (the
// oscillatory-efficiency substitution), or with the local rates (the averaged
// efficiency; only the local form makes the averaged accumulation telescope
// onto the coherent one).
Mismatch triple_mismatch(const Scenario& spec, int group, int target, const FwmTriple& t);
Mismatch triple_mismatch_tilted(const Scenario& spec, const TiltParams& tilt, int group,
                                int target, const FwmTriple& t, double z);
Mismatch triple_mismatch_local(const Scenario& spec, const TiltParams& tilt, int group,
                               int target, const FwmTriple& t, double z);

// Instantaneous intra-group FWM generation rate (W/m) onto the target channel
// from unperturbed signal profiles.
double fwm_rate(const Scenario& spec, const TiltParams& tilt, int group, int target, double z,
                FwmEfficiencyMode mode);

// Inter-mode-group FWM rate (W/m): non-degenerate triples only, pump pair in
// the source group, 2 g_n^2 sum r_nm^2 / D_m P_mh P_mk P_nl rho^(nm).
double img_fwm_rate(const Scenario& spec, const TiltParams& tilt, int group, int target, double z);

}  // namespace coexsim
