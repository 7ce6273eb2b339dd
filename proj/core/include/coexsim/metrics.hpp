#pragma once

#include "coexsim/scenario.hpp"

namespace coexsim {

// Interference power to PSD; reporting layers convert W/Hz to mW/GHz.
double psd(double p_int, double bandwidth);

// Single-photon DV-QKD error rate from the interference photon flux:
// QBER = P_int / (N_sig h f + P_int). Undefined when both terms vanish.
double qber(double signal_rate, double p_int, double frequency);

// CV-QKD excess noise in shot-noise units, fully attributed to the channel.
double excess_noise_snu(double p_int, double lo_shot_variance);

struct MetricSet {
  double p_int = 0.0;         // W over the slot bandwidth
  double psd_w_per_hz = 0.0;
  double qber = 0.0;
  double xi_snu = 0.0;
  bool has_qber = false;
  bool has_xi = false;
};

// Assembles reporting metrics for the quantum slot. QBER integrates the PSD
// over the detector bandwidth (defaults to the slot bandwidth).
MetricSet compute_metrics(const Scenario& spec, double p_int_slot);

}  // namespace coexsim
