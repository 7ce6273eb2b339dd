#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coexsim/scenario.hpp"

namespace coexsim {

// One exponential-tilt contribution acting on a mode group: the group's own
// SRS tilt, or (with inter-group terms enabled) the tilt pumped by another
// group. The exponent added to -alpha*z is c_r*(f_r - f_i)*total_power*L_eff(z)
// with L_eff computed from the pump group's alpha0.
struct TiltTerm {
  double c_r = 0.0;          // 1/(W m Hz)
  double f_r = 0.0;          // Hz, zero-tilt reference frequency
  double total_power = 0.0;  // W, pump group launch total
  double alpha0 = 0.0;       // 1/m, pump group total-power attenuation
};

struct GroupTilt {
  std::vector<TiltTerm> terms;  // empty: pure exponential decay
  double alpha0 = 0.0;          // fitted even when tilt is bypassed
  bool active() const { return !terms.empty(); }
};

struct TiltParams {
  std::vector<GroupTilt> groups;
  int n_r = 3;
};

// L_eff = (1 - exp(-alpha0 z)) / alpha0, with the z series limit near zero.
double effective_length(double alpha0, double z);

// alpha0 = (sum_i alpha_i^n_R P_i / P_T)^(1/n_R). Throws when no channel
// carries power.
double fit_alpha0(std::span<const double> p_tx, std::span<const double> alpha, int n_r);

// Closed-form tilt reference frequency. Returns nullopt ("no tilt") when the
// dimensionless tilt magnitude c_r * P_T * L_eff(L_s) * bandwidth is below
// 1e-6; the formula is singular as c_r -> 0.
std::optional<double> fit_f_r(std::span<const double> p_tx, std::span<const double> alpha,
                              std::span<const double> freq, double alpha0, double c_r,
                              double total_power, double span_length, int n_r);

// Per-group tilt parameters for a validated scenario. Groups without
// classical power, and all groups when solver.tilt is off, stay untitled.
TiltParams fit_tilt(const Scenario& spec);

// fit_tilt plus inter-group cross terms: c_r^(nm) = c_r^(n) A_n / A_nm and
// f_r^(nm) from a bisection enforcing lossless total-power conservation of
// the target group at z = L_s. Requires effective areas (img_terms).
TiltParams img_tilt_params(const Scenario& spec);

// Sum of tilt exponents acting on light at f_i in the group at position z.
double tilt_exponent(const TiltParams& tilt, int group, double f_i, double z);
// d/dz of the exponent: sum_t c(f_r - f_i) P e^(-alpha0 z).
double tilt_rate(const TiltParams& tilt, int group, double f_i, double z);

// Unperturbed signal power of (group, channel) at z.
double signal_profile(const Scenario& spec, const TiltParams& tilt, int group, int channel,
                      double z);

// z-averaged effective loss: alpha - (1/z) c_r (f_r - f_i) P_T L_eff(z);
// the z -> 0 limit is alpha - c_r (f_r - f_i) P_T.
double effective_loss(double alpha, double c_r, double f_r, double f_i, double total_power,
                      double alpha0, double z);

// Residual of the lossless conservation constraint at z for a group,
// |sum_i P_i(z) e^(alpha_i z) / P_T - 1|; used to certify the f_r^(nm) solve.
double conservation_residual(const Scenario& spec, const TiltParams& tilt, int group, double z);

}  // namespace coexsim
