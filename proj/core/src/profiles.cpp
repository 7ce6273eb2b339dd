#include "coexsim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coexsim/constants.hpp"
#include "coexsim/scenario.hpp"

namespace coexsim {

SpectralProfile::SpectralProfile(std::vector<std::pair<double, double>> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("spectral profile needs at least one sample");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (samples_[i].first <= samples_[i - 1].first)
      throw std::invalid_argument("spectral profile frequencies must be strictly increasing");
  }
}

SpectralProfile SpectralProfile::constant(double value) {
  return SpectralProfile({{0.0, value}});
}

double SpectralProfile::at(double f_hz) const {
  if (samples_.empty()) throw std::logic_error("empty spectral profile");
  if (samples_.size() == 1 || f_hz <= samples_.front().first) return samples_.front().second;
  if (f_hz >= samples_.back().first) return samples_.back().second;
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), f_hz,
                             [](double f, const auto& s) { return f < s.first; });
  auto lo = hi - 1;
  double t = (f_hz - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double RamanGainModel::at(double delta_f) const {
  if (delta_f < 0.0) throw std::domain_error("raman gain shift must be >= 0");
  if (table) return table->at(delta_f);
  return std::min(slope * delta_f, peak);
}

double RamanGainModel::signed_at(double delta_f) const {
  return delta_f >= 0.0 ? at(delta_f) : -at(-delta_f);
}

double attenuation_at(const SpectralProfile& profile, double f_hz) { return profile.at(f_hz); }
double rayleigh_at(const SpectralProfile& profile, double f_hz) { return profile.at(f_hz); }

double phonon_occupancy(double delta_f, double temperature) {
  if (delta_f <= 0.0) throw std::domain_error("phonon occupancy requires delta_f > 0");
  if (temperature <= 0.0) return 0.0;
  double x = kPlanck * delta_f / (kBoltzmann * temperature);
  // Below ~1 GHz shifts the exponent is ~1e-4; expm1 keeps full precision and
  // the series limit k_B T / (h df) is recovered automatically.
  if (x > 700.0) return 0.0;  // exp would overflow; occupancy is ~e^-700 anyway
  return 1.0 / std::expm1(x);
}

double raman_gain(const RamanGainModel& model, double delta_f) { return model.at(delta_f); }

double raman_cross_section(double f_i, double f_h, double temperature, double b_s,
                           const RamanGainModel& model) {
  if (f_i == f_h) throw std::domain_error("raman cross-section requires distinct frequencies");
  double psi = phonon_occupancy(std::abs(f_i - f_h), temperature);
  if (f_i < f_h)  // Stokes side: spontaneous plus stimulated share
    return (1.0 + psi) * kPlanck * f_i * b_s * model.at(f_h - f_i);
  return psi * kPlanck * f_i * b_s * model.at(f_i - f_h);
}

double nonlinear_scaling_factor(int degenerate_modes, double raman_fraction) {
  if (degenerate_modes < 1) throw std::domain_error("degenerate mode count must be >= 1");
  if (raman_fraction < 0.0 || raman_fraction > 1.0)
    throw std::domain_error("raman fraction must be in [0, 1]");
  if (degenerate_modes == 1) return 1.0;
  double d = static_cast<double>(degenerate_modes);
  return d / (d + 1.0) * (4.0 / 3.0 * (1.0 - raman_fraction) + 1.5 * raman_fraction);
}

double crosstalk_at(const CouplingSpec& coupling, int to_group, int from_group, double f_hz) {
  if (to_group == from_group) throw std::domain_error("crosstalk requires distinct mode groups");
  const SpectralProfile* profile = coupling.kappa_profile(to_group, from_group);
  if (!profile) return 0.0;  // unlisted pair means no coupling
  return profile->at(f_hz);
}

}  // namespace coexsim
