#include "coexsim/metrics.hpp"

#include <stdexcept>

#include "coexsim/constants.hpp"

namespace coexsim {

double psd(double p_int, double bandwidth) {
  if (bandwidth <= 0.0) throw std::domain_error("psd requires bandwidth > 0");
  return p_int / bandwidth;
}

double qber(double signal_rate, double p_int, double frequency) {
  if (signal_rate < 0.0) throw std::domain_error("qber requires signal_rate >= 0");
  double signal_power = signal_rate * kPlanck * frequency;
  double denom = signal_power + p_int;
  if (denom <= 0.0) throw std::domain_error("qber undefined: no signal and no interference");
  return p_int / denom;
}

double excess_noise_snu(double p_int, double lo_shot_variance) {
  if (lo_shot_variance <= 0.0) throw std::domain_error("excess noise requires sigma^2 > 0");
  return p_int / lo_shot_variance;
}

MetricSet compute_metrics(const Scenario& spec, double p_int_slot) {
  MetricSet m;
  m.p_int = p_int_slot;
  m.psd_w_per_hz = psd(p_int_slot, spec.grid.spacing);
  if (spec.receiver) {
    double f = spec.grid.frequency(spec.grid.quantum_channel);
    double b_det = spec.receiver->detector_bandwidth > 0.0 ? spec.receiver->detector_bandwidth
                                                           : spec.grid.spacing;
    double p_det = m.psd_w_per_hz * b_det * spec.receiver->detector_efficiency;
    if (spec.receiver->signal_rate > 0.0 || p_det > 0.0) {
      m.qber = qber(spec.receiver->signal_rate, p_det, f);
      m.has_qber = true;
    }
    if (spec.receiver->lo_shot_variance > 0.0) {
      m.xi_snu = excess_noise_snu(p_int_slot, spec.receiver->lo_shot_variance);
      m.has_xi = true;
    }
  }
  return m;
}

}  // namespace coexsim
