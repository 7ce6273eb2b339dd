#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace coexsim {

// Piecewise-linear spectral coefficient, constant extrapolation beyond the
// sampled range. A single sample behaves as a frequency-constant value.
class SpectralProfile {
 public:
  SpectralProfile() = default;
  explicit SpectralProfile(std::vector<std::pair<double, double>> samples);
  static SpectralProfile constant(double value);

  double at(double f_hz) const;
  bool is_constant() const { return samples_.size() == 1; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  bool operator==(const SpectralProfile&) const = default;

 private:
  std::vector<std::pair<double, double>> samples_;  // (Hz, value), strictly increasing f
};

// Raman gain efficiency g_R vs frequency shift (shift >= 0).
// Default is the clipped-linear model min(slope * df, peak); a tabulated
// profile can be supplied instead for wide-band studies.
struct RamanGainModel {
  double slope = 0.0;                                     // 1/(W m Hz)
  double peak = std::numeric_limits<double>::infinity();  // 1/(W m)
  std::optional<SpectralProfile> table;                   // g_R vs shift (Hz)

  double at(double delta_f) const;         // delta_f >= 0
  double signed_at(double delta_f) const;  // antisymmetric extension, for SRS coupling
  bool operator==(const RamanGainModel&) const = default;
};

struct CouplingSpec;  // scenario.hpp

double attenuation_at(const SpectralProfile& profile, double f_hz);
double rayleigh_at(const SpectralProfile& profile, double f_hz);

// Eq.-level coefficient evaluators. delta_f in Hz, T in K, B_s in Hz.
double phonon_occupancy(double delta_f, double temperature);
double raman_gain(const RamanGainModel& model, double delta_f);
double raman_cross_section(double f_i, double f_h, double temperature, double b_s,
                           const RamanGainModel& model);
double nonlinear_scaling_factor(int degenerate_modes, double raman_fraction);
double crosstalk_at(const CouplingSpec& coupling, int to_group, int from_group, double f_hz);

}  // namespace coexsim
