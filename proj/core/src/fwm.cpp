#include "coexsim/fwm.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace coexsim {

std::vector<FwmTriple> enumerate_triples(const ChannelGrid& grid, int group, int target) {
  const int n = grid.count;
  if (target < 0 || target >= n) throw std::out_of_range("fwm target channel out of range");
  std::vector<FwmTriple> out;
  for (int h = 0; h < n; ++h) {
    if (h == target || !grid.allocated(group, h)) continue;
    int k = 2 * h - target;
    if (k >= 0 && k < n && grid.allocated(group, k)) out.push_back({h, k, h, true});
  }
  for (int h = 0; h < n; ++h) {
    if (h == target || !grid.allocated(group, h)) continue;
    for (int l = 0; l < n; ++l) {
      if (l == target || l == h || !grid.allocated(group, l)) continue;
      int k = h + l - target;
      if (k < 0 || k >= n || k == target || !grid.allocated(group, k)) continue;
      out.push_back({h, k, l, false});
    }
  }
  return out;
}

double phase_mismatch(double beta2, double f_i, double f_h, double f_k, double f_l) {
  constexpr double two_pi2 = 2.0 * std::numbers::pi * std::numbers::pi;
  // factored form of f_i^2 - f_h^2 + f_k^2 - f_l^2; the raw squares cancel
  // catastrophically at C-band magnitudes
  return two_pi2 * beta2 * ((f_i - f_h) * (f_i + f_h) + (f_k - f_l) * (f_k + f_l));
}

double loss_mismatch(double alpha_i, double alpha_h, double alpha_k, double alpha_l) {
  return alpha_i - alpha_h - alpha_k - alpha_l;
}

double efficiency_exact(const Mismatch& m, double z) {
  if (z < 0.0) throw std::domain_error("efficiency requires z >= 0");
  std::complex<double> s(0.5 * m.delta_alpha, m.delta_beta);
  double sz = std::abs(s) * z;
  if (sz < 1e-8) {
    // (1 - e^{-sz})/s = z (1 - sz/2 + (sz)^2/6 - ...)
    std::complex<double> szc = s * z;
    return 2.0 * (z * (1.0 - szc / 2.0 + szc * szc / 6.0)).real();
  }
  return 2.0 * ((1.0 - std::exp(-s * z)) / s).real();
}

double efficiency_averaged(const Mismatch& m) {
  double denom = m.delta_alpha * m.delta_alpha + 4.0 * m.delta_beta * m.delta_beta;
  if (denom == 0.0)
    throw std::domain_error("averaged efficiency undefined at zero mismatch; use the exact form");
  return 4.0 * m.delta_alpha / denom;
}

ChiSet chi_and_envelopes(const Mismatch& m, double z) {
  double ea = std::exp(m.delta_alpha * z);
  double eh = std::exp(0.5 * m.delta_alpha * z);
  ChiSet c;
  c.chi = ea - 2.0 * eh * std::cos(m.delta_beta * z) + 1.0;
  c.chi_max = ea + 2.0 * eh + 1.0;
  c.chi_min = ea - 2.0 * eh + 1.0;
  c.chi_avg = ea + 1.0;
  return c;
}

namespace {

double chi_of_kind(const ChiSet& c, ChiKind kind) {
  switch (kind) {
    case ChiKind::exact: return c.chi;
    case ChiKind::averaged: return c.chi_avg;
    case ChiKind::upper: return c.chi_max;
    case ChiKind::lower: return c.chi_min;
  }
  return c.chi;
}

}  // namespace

double closed_form_fwm_power(const Scenario& spec, int group, int target, double z,
                             ChiKind kind) {
  const ModeGroupSpec& mg = spec.groups[group];
  const double d = static_cast<double>(mg.degenerate_modes);
  const double pref = 4.0 * spec.r[group] * spec.r[group] * mg.gamma * mg.gamma / (d * d);
  const auto& p = spec.launch.p_tx[group];

  double sum = 0.0;
  for (const FwmTriple& t : enumerate_triples(spec.grid, group, target)) {
    Mismatch m = triple_mismatch(spec, group, target, t);
    double denom = m.delta_alpha * m.delta_alpha + 4.0 * m.delta_beta * m.delta_beta;
    if (denom == 0.0) continue;
    double chi = chi_of_kind(chi_and_envelopes(m, z), kind);
    double weight = t.degenerate ? (mg.kurtosis[t.h] + 2.0)
                                 : 2.0 * d;
    sum += weight * p[t.h] * p[t.k] * p[t.l] * chi / denom;
  }
  return pref * sum * std::exp(-spec.alpha[group][target] * z);
}

double fwm_input_condition(const Scenario& spec, const TiltParams* tilt, int group, int target,
                           bool use_average) {
  if (!use_average) return 0.0;
  const ModeGroupSpec& mg = spec.groups[group];
  const double d = static_cast<double>(mg.degenerate_modes);
  const double pref = 8.0 * spec.r[group] * spec.r[group] * mg.gamma * mg.gamma / (d * d);
  const auto& p = spec.launch.p_tx[group];

  double sum = 0.0;
  for (const FwmTriple& t : enumerate_triples(spec.grid, group, target)) {
    Mismatch m = tilt ? triple_mismatch_tilted(spec, *tilt, group, target, t, 0.0)
                      : triple_mismatch(spec, group, target, t);
    double denom = m.delta_alpha * m.delta_alpha + 4.0 * m.delta_beta * m.delta_beta;
    if (denom == 0.0) continue;
    double weight = t.degenerate ? (mg.kurtosis[t.h] + 2.0) : 2.0 * d;
    sum += weight * p[t.h] * p[t.k] * p[t.l] / denom;
  }
  return pref * sum;
}

double alpha_tilde(const Scenario& spec, const TiltParams& tilt, int group, int channel,
                   double z) {
  double a = spec.alpha[group][channel];
  if (!tilt.groups[group].active()) return a;
  double f = spec.grid.frequency(channel);
  if (z < 1e-12) return a - tilt_rate(tilt, group, f, 0.0);
  return a - tilt_exponent(tilt, group, f, z) / z;
}

Mismatch triple_mismatch(const Scenario& spec, int group, int target, const FwmTriple& t) {
  const auto& a = spec.alpha[group];
  Mismatch m;
  m.delta_alpha = loss_mismatch(a[target], a[t.h], a[t.k], a[t.l]);
  m.delta_beta = phase_mismatch(spec.groups[group].beta2, spec.grid.frequency(target),
                                spec.grid.frequency(t.h), spec.grid.frequency(t.k),
                                spec.grid.frequency(t.l));
  return m;
}

Mismatch triple_mismatch_tilted(const Scenario& spec, const TiltParams& tilt, int group,
                                int target, const FwmTriple& t, double z) {
  Mismatch m = triple_mismatch(spec, group, target, t);
  if (!tilt.groups[group].active()) return m;
  m.delta_alpha = alpha_tilde(spec, tilt, group, target, z) -
                  alpha_tilde(spec, tilt, group, t.h, z) -
                  alpha_tilde(spec, tilt, group, t.k, z) -
                  alpha_tilde(spec, tilt, group, t.l, z);
  return m;
}

double alpha_local(const Scenario& spec, const TiltParams& tilt, int group, int channel,
                   double z) {
  double a = spec.alpha[group][channel];
  if (!tilt.groups[group].active()) return a;
  return a - tilt_rate(tilt, group, spec.grid.frequency(channel), z);
}

Mismatch triple_mismatch_local(const Scenario& spec, const TiltParams& tilt, int group,
                               int target, const FwmTriple& t, double z) {
  Mismatch m = triple_mismatch(spec, group, target, t);
  if (!tilt.groups[group].active()) return m;
  m.delta_alpha = alpha_local(spec, tilt, group, target, z) -
                  alpha_local(spec, tilt, group, t.h, z) -
                  alpha_local(spec, tilt, group, t.k, z) -
                  alpha_local(spec, tilt, group, t.l, z);
  return m;
}

double fwm_rate(const Scenario& spec, const TiltParams& tilt, int group, int target, double z,
                FwmEfficiencyMode mode) {
  const ModeGroupSpec& mg = spec.groups[group];
  if (mg.gamma == 0.0 || spec.group_power[group] <= 0.0) return 0.0;
  const double d = static_cast<double>(mg.degenerate_modes);
  const double pref = spec.r[group] * spec.r[group] * mg.gamma * mg.gamma / (d * d);

  double sum = 0.0;
  for (const FwmTriple& t : enumerate_triples(spec.grid, group, target)) {
    double ph = signal_profile(spec, tilt, group, t.h, z);
    double pk = signal_profile(spec, tilt, group, t.k, z);
    double pl = signal_profile(spec, tilt, group, t.l, z);
    if (ph == 0.0 || pk == 0.0 || pl == 0.0) continue;
    Mismatch m = mode == FwmEfficiencyMode::averaged
                     ? triple_mismatch_local(spec, tilt, group, target, t, z)
                     : triple_mismatch_tilted(spec, tilt, group, target, t, z);
    double rho = mode == FwmEfficiencyMode::averaged ? efficiency_averaged(m)
                                                     : efficiency_exact(m, z);
    double weight = t.degenerate ? (mg.kurtosis[t.h] + 2.0) : 2.0 * d;
    sum += weight * ph * pk * pl * rho;
  }
  return pref * sum;
}

double img_fwm_rate(const Scenario& spec, const TiltParams& tilt, int group, int target,
                    double z) {
  const int n_ch = spec.grid.count;
  const double gamma_n = spec.groups[group].gamma;
  if (gamma_n == 0.0) return 0.0;
  double rate = 0.0;
  for (int m = 0; m < spec.group_count(); ++m) {
    if (m == group) continue;
    const CouplingSpec::Pair* pair = spec.coupling.find(group, m);
    if (!pair || !pair->fwm_overlap) continue;
    double r_nm = *pair->fwm_overlap;
    if (r_nm == 0.0) continue;
    double d_m = static_cast<double>(spec.groups[m].degenerate_modes);
    double pref = 2.0 * gamma_n * gamma_n * r_nm * r_nm / d_m;

    double f_i = spec.grid.frequency(target);
    double at_i = alpha_local(spec, tilt, group, target, z);
    for (int h = 0; h < n_ch; ++h) {
      if (h == target || !spec.grid.allocated(m, h)) continue;
      for (int l = 0; l < n_ch; ++l) {
        if (l == target || l == h || !spec.grid.allocated(group, l)) continue;
        int k = h + l - target;
        if (k < 0 || k >= n_ch || k == target || !spec.grid.allocated(m, k)) continue;
        double ph = signal_profile(spec, tilt, m, h, z);
        double pk = signal_profile(spec, tilt, m, k, z);
        double pl = signal_profile(spec, tilt, group, l, z);
        if (ph == 0.0 || pk == 0.0 || pl == 0.0) continue;
        Mismatch mm;
        mm.delta_alpha = at_i - alpha_local(spec, tilt, m, h, z) -
                         alpha_local(spec, tilt, m, k, z) - alpha_local(spec, tilt, group, l, z);
        double f_h = spec.grid.frequency(h), f_k = spec.grid.frequency(k),
               f_l = spec.grid.frequency(l);
        constexpr double two_pi2 = 2.0 * std::numbers::pi * std::numbers::pi;
        mm.delta_beta =
            two_pi2 * (spec.groups[group].beta2 * (f_i - f_l) * (f_i + f_l) +
                       spec.groups[m].beta2 * (f_k - f_h) * (f_k + f_h));
        rate += pref * ph * pk * pl * efficiency_averaged(mm);
      }
    }
  }
  return rate;
}

}  // namespace coexsim
