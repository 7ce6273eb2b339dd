#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coexsim/fwm.hpp"
#include "coexsim/kinetics.hpp"
#include "coexsim/scenario.hpp"

namespace coexsim {

// Numerically exact references used by tests and the verify command. Nothing
// here depends on the closed-form tilt profiles or the averaged FWM
// efficiencies those references certify.

struct SrsTrajectory {
  std::vector<double> z;
  // p[sample][group][channel], W
  std::vector<std::vector<std::vector<double>>> p;

  double at(int sample, int group, int channel) const { return p[sample][group][channel]; }
};

// RK4 on the coupled SRS power equations
// dP_i/dz = -a_i P_i + sum_h g_R(f_h - f_i) P_i P_h (antisymmetric coupling,
// unit photon-energy ratio); inter-group pump terms join when img_terms is on.
SrsTrajectory srs_coupled_solve(const Scenario& spec, long steps, int keep_samples = 101);

// alpha_tilde(z) = -(1/z) ln(P(z)/P(0))
double effective_attenuation_from_profile(double p0, double pz, double z);

// FWM efficiency by quadrature of the coherent-accumulation kernel
//   rho(z) = 2 int_0^z exp([L(z') - L(z)]/2) cos(db (z - z')) dz'
// where L(z) is the signed loss-exponent combination of the four channels.
// With constant attenuation L(z) = -delta_alpha z and the integral reduces to
// the closed form exactly.
double efficiency_numeric(const Mismatch& m, double z, long steps);
double efficiency_numeric(const std::function<double(double)>& loss_exponent, double delta_beta,
                          double z, long steps);

// Accumulated FWM power at the target channel by coherent per-triple
// quadrature with profile-derived effective losses; the reference side of the
// SRS-aware averaged-efficiency comparison.
double fwm_power_quadrature(const Scenario& spec, int group, int target, double z, long steps);

// Full-model ground truth: joint RK4 of the coupled SRS signals, per-channel
// loss exponents, the coherent FWM field integrals, and the interference
// equations, at the requested step count, tracking the full grid. Sample
// retention is capped (subsampled) at keep_samples.
SolveResult fine_step_reference(const Scenario& spec, long steps = 1000000,
                                int keep_samples = 1001);

struct OracleRow {
  std::string quantity;
  double reference = 0.0;
  double value = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double delta_db = 0.0;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  long reference_steps = 0;
  long target_steps = 0;
  double reference_seconds = 0.0;
  double target_seconds = 0.0;

  double max_abs_delta_db() const;
  std::string to_csv() const;
  std::string summary(double tolerance_db) const;
};

}  // namespace coexsim
