#include "coexsim/srs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coexsim {

namespace {

constexpr double kTiltThreshold = 1e-6;

// Slope of the group's Raman gain linearization. Tabulated models use the
// secant across the occupied bandwidth.
double linear_slope(const RamanGainModel& model, double bandwidth) {
  if (!model.table) return model.slope;
  if (bandwidth <= 0.0) return 0.0;
  return model.table->at(bandwidth) / bandwidth;
}

struct OccupiedBand {
  double f_lo = 0.0, f_hi = 0.0, width = 0.0;
  int active = 0;
};

OccupiedBand occupied_band(std::span<const double> p_tx, std::span<const double> freq) {
  OccupiedBand band;
  for (std::size_t i = 0; i < p_tx.size(); ++i) {
    if (p_tx[i] <= 0.0) continue;
    if (band.active == 0) {
      band.f_lo = band.f_hi = freq[i];
    } else {
      band.f_lo = std::min(band.f_lo, freq[i]);
      band.f_hi = std::max(band.f_hi, freq[i]);
    }
    ++band.active;
  }
  band.width = band.f_hi - band.f_lo;
  return band;
}

}  // namespace

double effective_length(double alpha0, double z) {
  if (z < 0.0) throw std::domain_error("effective length requires z >= 0");
  double az = alpha0 * z;
  if (std::abs(az) < 1e-9) return z;
  return (1.0 - std::exp(-az)) / alpha0;
}

double fit_alpha0(std::span<const double> p_tx, std::span<const double> alpha, int n_r) {
  if (n_r < 1) throw std::domain_error("n_R must be >= 1");
  double total = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < p_tx.size(); ++i) {
    if (p_tx[i] <= 0.0) continue;
    total += p_tx[i];
    acc += std::pow(alpha[i], n_r) * p_tx[i];
  }
  if (total <= 0.0) throw std::domain_error("fit_alpha0: group carries no classical power");
  return std::pow(acc / total, 1.0 / n_r);
}

std::optional<double> fit_f_r(std::span<const double> p_tx, std::span<const double> alpha,
                              std::span<const double> freq, double alpha0, double c_r,
                              double total_power, double span_length, int n_r) {
  OccupiedBand band = occupied_band(p_tx, freq);
  if (band.active == 0) return std::nullopt;
  double leff = effective_length(alpha0, span_length);
  double scale = c_r * total_power * leff;
  if (scale * band.width < kTiltThreshold) return std::nullopt;

  // log-sum-exp over the weighted summands; the per-channel exponent
  // -c_r f_i P_T L_eff is large (~f_i * scale) but nearly common.
  double max_e = -std::numeric_limits<double>::infinity();
  std::vector<double> exps;
  exps.reserve(p_tx.size());
  for (std::size_t i = 0; i < p_tx.size(); ++i) {
    if (p_tx[i] <= 0.0) continue;
    double e = n_r * std::log(alpha[i] / alpha0) + std::log(p_tx[i] / total_power) +
               (alpha0 - alpha[i]) * span_length - scale * freq[i];
    exps.push_back(e);
    max_e = std::max(max_e, e);
  }
  double sum = 0.0;
  for (double e : exps) sum += std::exp(e - max_e);
  double log_sum = max_e + std::log(sum);
  return -log_sum / scale;
}

TiltParams fit_tilt(const Scenario& spec) {
  TiltParams tilt;
  tilt.n_r = spec.solver.n_r;
  tilt.groups.resize(spec.group_count());

  std::vector<double> freq(spec.grid.count);
  for (int c = 0; c < spec.grid.count; ++c) freq[c] = spec.grid.frequency(c);

  for (int g = 0; g < spec.group_count(); ++g) {
    if (spec.group_power[g] <= 0.0) continue;
    GroupTilt& gt = tilt.groups[g];
    gt.alpha0 = fit_alpha0(spec.launch.p_tx[g], spec.alpha[g], spec.solver.n_r);
    if (!spec.solver.tilt) continue;
    OccupiedBand band = occupied_band(spec.launch.p_tx[g], freq);
    double c_r = linear_slope(spec.groups[g].raman_gain, band.width);
    auto f_r = fit_f_r(spec.launch.p_tx[g], spec.alpha[g], freq, gt.alpha0, c_r,
                       spec.group_power[g], spec.solver.span_length, spec.solver.n_r);
    if (f_r) gt.terms.push_back({c_r, *f_r, spec.group_power[g], gt.alpha0});
  }
  return tilt;
}

namespace {

// Lossless conservation constraint for group n with a trial cross reference x:
// sum_i w_i exp(own tilt exponents) exp(c_nm (x - f_i) P_T,m L_m) - 1, with the
// same alpha^n_R weighting the closed-form f_r satisfies exactly.
double cross_constraint(const Scenario& spec, const GroupTilt& own, int group, double c_nm,
                        double p_t_m, double leff_m, double x) {
  double l_s = spec.solver.span_length;
  double sum = 0.0;
  for (int c = 0; c < spec.grid.count; ++c) {
    double p = spec.launch.p_tx[group][c];
    if (p <= 0.0) continue;
    double f = spec.grid.frequency(c);
    double a = spec.alpha[group][c];
    double e = spec.solver.n_r * std::log(a / own.alpha0) + (own.alpha0 - a) * l_s;
    for (const TiltTerm& t : own.terms)
      e += t.c_r * (t.f_r - f) * t.total_power * effective_length(t.alpha0, l_s);
    e += c_nm * (x - f) * p_t_m * leff_m;
    sum += p / spec.group_power[group] * std::exp(e);
  }
  return sum - 1.0;
}

}  // namespace

TiltParams img_tilt_params(const Scenario& spec) {
  TiltParams tilt = fit_tilt(spec);
  if (!spec.solver.tilt) return tilt;

  std::vector<double> freq(spec.grid.count);
  for (int c = 0; c < spec.grid.count; ++c) freq[c] = spec.grid.frequency(c);

  // Occupied band across every powered group, extended for the root bracket.
  double f_lo = 0.0, f_hi = 0.0;
  bool any = false;
  for (int g = 0; g < spec.group_count(); ++g) {
    if (spec.group_power[g] <= 0.0) continue;
    OccupiedBand band = occupied_band(spec.launch.p_tx[g], freq);
    if (!any) {
      f_lo = band.f_lo;
      f_hi = band.f_hi;
      any = true;
    } else {
      f_lo = std::min(f_lo, band.f_lo);
      f_hi = std::max(f_hi, band.f_hi);
    }
  }
  if (!any) return tilt;

  for (int n = 0; n < spec.group_count(); ++n) {
    if (spec.group_power[n] <= 0.0) continue;  // untilted groups stay untilted
    // Pairs are solved independently against the group's own tilt; with more
    // than two groups this is a pairwise approximation.
    const GroupTilt own = tilt.groups[n];
    std::vector<TiltTerm> cross_terms;
    for (int m = 0; m < spec.group_count(); ++m) {
      if (m == n || spec.group_power[m] <= 0.0) continue;
      const CouplingSpec::Pair* pair = spec.coupling.find(n, m);
      if (!pair) continue;
      if (!spec.groups[n].a_eff || !pair->a_eff_cross)
        throw std::invalid_argument("img tilt: missing effective areas for pair (" +
                                    std::to_string(n) + "," + std::to_string(m) + ")");
      OccupiedBand band_n = occupied_band(spec.launch.p_tx[n], freq);
      double c_n = linear_slope(spec.groups[n].raman_gain, band_n.width);
      double c_nm = c_n * (*spec.groups[n].a_eff) / (*pair->a_eff_cross);
      double alpha0_m = tilt.groups[m].alpha0;
      double leff_m = effective_length(alpha0_m, spec.solver.span_length);
      double scale = c_nm * spec.group_power[m] * leff_m;
      if (scale * (f_hi - f_lo) < kTiltThreshold) continue;

      double lo = f_lo - 10e12, hi = f_hi + 10e12;
      double flo = cross_constraint(spec, own, n, c_nm, spec.group_power[m], leff_m, lo);
      double fhi = cross_constraint(spec, own, n, c_nm, spec.group_power[m], leff_m, hi);
      if (flo > 0.0 || fhi < 0.0)
        throw std::runtime_error("img tilt: conservation root not bracketed for pair (" +
                                 std::to_string(n) + "," + std::to_string(m) + ")");
      // bisect until the conservation residual is far below the 1e-6 contract
      for (int it = 0; it < 120 && (hi - lo) > 1.0; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = cross_constraint(spec, own, n, c_nm, spec.group_power[m], leff_m, mid);
        (fm < 0.0 ? lo : hi) = mid;
      }
      cross_terms.push_back({c_nm, 0.5 * (lo + hi), spec.group_power[m], alpha0_m});
    }
    for (TiltTerm& t : cross_terms) tilt.groups[n].terms.push_back(t);
  }
  return tilt;
}

double tilt_exponent(const TiltParams& tilt, int group, double f_i, double z) {
  const GroupTilt& gt = tilt.groups[group];
  double e = 0.0;
  for (const TiltTerm& t : gt.terms)
    e += t.c_r * (t.f_r - f_i) * t.total_power * effective_length(t.alpha0, z);
  return e;
}

double tilt_rate(const TiltParams& tilt, int group, double f_i, double z) {
  const GroupTilt& gt = tilt.groups[group];
  double r = 0.0;
  for (const TiltTerm& t : gt.terms)
    r += t.c_r * (t.f_r - f_i) * t.total_power * std::exp(-t.alpha0 * z);
  return r;
}

double signal_profile(const Scenario& spec, const TiltParams& tilt, int group, int channel,
                      double z) {
  double p0 = spec.launch.p_tx[group][channel];
  if (p0 <= 0.0) return 0.0;
  double f = spec.grid.frequency(channel);
  return p0 * std::exp(-spec.alpha[group][channel] * z + tilt_exponent(tilt, group, f, z));
}

double effective_loss(double alpha, double c_r, double f_r, double f_i, double total_power,
                      double alpha0, double z) {
  double tilt = c_r * (f_r - f_i) * total_power;
  if (z <= 0.0) return alpha - tilt;  // L_eff(z)/z -> 1
  return alpha - tilt * effective_length(alpha0, z) / z;
}

double conservation_residual(const Scenario& spec, const TiltParams& tilt, int group, double z) {
  if (spec.group_power[group] <= 0.0) return 0.0;
  double sum = 0.0;
  for (int c = 0; c < spec.grid.count; ++c) {
    double p = signal_profile(spec, tilt, group, c, z);
    sum += p * std::exp(spec.alpha[group][c] * z);
  }
  return std::abs(sum / spec.group_power[group] - 1.0);
}

}  // namespace coexsim
