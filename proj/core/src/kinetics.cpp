#include "coexsim/kinetics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coexsim/profiles.hpp"

namespace coexsim {

int SolveResult::index_of(int group, int channel) const {
  for (std::size_t t = 0; t < tracked.size(); ++t)
    if (tracked[t].group == group && tracked[t].channel == channel) return static_cast<int>(t);
  return -1;
}

double SolveResult::quantum_endpoint(const Scenario& spec) const {
  int t = index_of(spec.grid.quantum_group, spec.grid.quantum_channel);
  if (t < 0) throw std::logic_error("quantum channel is not tracked in this solve");
  if (!backward.empty()) return backward.front()[t];  // counter scheme: read out at z = 0
  return forward.back()[t];
}

std::vector<TrackedChannel> tracked_channels(const Scenario& spec) {
  std::vector<TrackedChannel> out;
  if (spec.solver.track_mode == TrackMode::full_grid) {
    for (int g = 0; g < spec.group_count(); ++g)
      for (int c = 0; c < spec.grid.count; ++c) out.push_back({g, c});
    return out;
  }
  const int qg = spec.grid.quantum_group, qc = spec.grid.quantum_channel;
  if (spec.group_count() == 1) {
    out.push_back({qg, qc});
    return out;
  }
  // Quantum group in full (indirect paths: crosstalked light generating SpRS
  // in-group) plus the quantum slot of every classical group (noise generated
  // there crosstalks in).
  for (int c = 0; c < spec.grid.count; ++c) out.push_back({qg, c});
  for (int g = 0; g < spec.group_count(); ++g)
    if (g != qg) out.push_back({g, qc});
  return out;
}

namespace {

struct TripleTerm {
  int h, k, l;
  double weight;        // (kurtosis_h + 2) degenerate, 2 D non-degenerate
  double dalpha;        // static loss mismatch
  double dbeta;
};

struct EqTerms {
  int group, channel;
  double f;
  double alpha;
  std::vector<double> eta;  // same-group SpRS row, zero at h == channel
  struct Xtalk {
    int m;
    double kappa;
  };
  std::vector<Xtalk> xtalk;
  struct ImgEta {
    int m;
    std::vector<double> eta;
  };
  std::vector<ImgEta> img_eta;
  std::vector<TripleTerm> triples;
  double fwm_pref = 0.0;  // r^2 gamma^2 / D^2
  bool img_fwm = false;
};

struct Workspace {
  const Scenario& spec;
  TiltParams tilt;
  std::vector<TrackedChannel> tracked;
  std::vector<std::vector<int>> dense_index;  // [g][c] -> eq index or -1
  std::vector<EqTerms> eqs;
  std::vector<bool> tilted;

  // per-stage caches
  double stage_z = -1.0;
  std::vector<std::vector<double>> sig;
  std::vector<std::vector<double>> atld;  // z-averaged effective loss (exact efficiency)
  std::vector<std::vector<double>> aloc;  // local effective rate (averaged efficiency, loss term)

  Workspace(const Scenario& s, TiltParams t, std::vector<TrackedChannel> track)
      : spec(s), tilt(std::move(t)), tracked(std::move(track)) {
    const int n_g = spec.group_count(), n_ch = spec.grid.count;
    dense_index.assign(n_g, std::vector<int>(n_ch, -1));
    for (std::size_t i = 0; i < tracked.size(); ++i)
      dense_index[tracked[i].group][tracked[i].channel] = static_cast<int>(i);
    tilted.resize(n_g);
    for (int g = 0; g < n_g; ++g) tilted[g] = tilt.groups[g].active();
    sig.assign(n_g, std::vector<double>(n_ch, 0.0));
    atld.assign(n_g, std::vector<double>(n_ch, 0.0));
    aloc.assign(n_g, std::vector<double>(n_ch, 0.0));

    for (const TrackedChannel& tc : tracked) {
      EqTerms e;
      e.group = tc.group;
      e.channel = tc.channel;
      e.f = spec.grid.frequency(tc.channel);
      e.alpha = spec.alpha[tc.group][tc.channel];

      const ModeGroupSpec& mg = spec.groups[tc.group];
      e.eta.assign(n_ch, 0.0);
      for (int h = 0; h < n_ch; ++h) {
        if (h == tc.channel) continue;
        e.eta[h] = raman_cross_section(e.f, spec.grid.frequency(h), spec.launch.temperature,
                                       spec.grid.spacing, mg.raman_gain);
      }
      for (int m = 0; m < n_g; ++m) {
        if (m == tc.group) continue;
        double kappa = crosstalk_at(spec.coupling, tc.group, m, e.f);
        if (kappa > 0.0) e.xtalk.push_back({m, kappa});
      }
      if (spec.solver.img_terms && mg.a_eff) {
        for (int m = 0; m < n_g; ++m) {
          if (m == tc.group) continue;
          const CouplingSpec::Pair* pair = spec.coupling.find(tc.group, m);
          if (!pair || !pair->a_eff_cross) continue;
          double scale = *mg.a_eff / *pair->a_eff_cross;
          EqTerms::ImgEta ie;
          ie.m = m;
          ie.eta.assign(n_ch, 0.0);
          for (int h = 0; h < n_ch; ++h)
            if (h != tc.channel) ie.eta[h] = e.eta[h] * scale;
          e.img_eta.push_back(std::move(ie));
        }
        e.img_fwm = true;
      }

      // FWM only where unperturbed signals exist to drive it; a group without
      // classical power generates none (the quantum group in SDM links).
      if (spec.group_power[tc.group] > 0.0 && mg.gamma > 0.0) {
        double d = static_cast<double>(mg.degenerate_modes);
        e.fwm_pref = spec.r[tc.group] * spec.r[tc.group] * mg.gamma * mg.gamma / (d * d);
        for (const FwmTriple& t : enumerate_triples(spec.grid, tc.group, tc.channel)) {
          Mismatch mm = triple_mismatch(spec, tc.group, tc.channel, t);
          double w = t.degenerate ? (mg.kurtosis[t.h] + 2.0) : 2.0 * d;
          e.triples.push_back({t.h, t.k, t.l, w, mm.delta_alpha, mm.delta_beta});
        }
      }
      eqs.push_back(std::move(e));
    }
  }

  void prepare(double z) {
    if (stage_z == z) return;
    stage_z = z;
    const int n_g = spec.group_count(), n_ch = spec.grid.count;
    for (int g = 0; g < n_g; ++g) {
      for (int c = 0; c < n_ch; ++c) {
        double p0 = spec.launch.p_tx[g][c];
        sig[g][c] = p0 > 0.0 ? signal_profile(spec, tilt, g, c, z) : 0.0;
      }
      if (tilted[g]) {
        for (int c = 0; c < n_ch; ++c) {
          atld[g][c] = alpha_tilde(spec, tilt, g, c, z);
          aloc[g][c] = alpha_local(spec, tilt, g, c, z);
        }
      } else {
        aloc[g] = spec.alpha[g];
      }
    }
  }

  double pint(const std::vector<double>& y, int g, int c) const {
    int t = dense_index[g][c];
    return t >= 0 ? y[t] : 0.0;
  }

  // Forward-pass RHS. Caller must prepare(z) first.
  double rate(std::size_t i, double z, const std::vector<double>& y,
              const SourceToggles& tg) const {
    const EqTerms& e = eqs[i];
    const int n_ch = spec.grid.count;
    double r = -aloc[e.group][e.channel] * y[i];

    for (const auto& x : e.xtalk)
      r += x.kappa * ((tg.crosstalk ? sig[x.m][e.channel] : 0.0) + pint(y, x.m, e.channel));

    for (int h = 0; h < n_ch; ++h) {
      double eta = e.eta[h];
      if (eta == 0.0) continue;
      r += eta * ((tg.sprs ? sig[e.group][h] : 0.0) + pint(y, e.group, h));
    }

    for (const auto& ie : e.img_eta) {
      for (int h = 0; h < n_ch; ++h) {
        double eta = ie.eta[h];
        if (eta == 0.0) continue;
        r += eta * ((tg.sprs ? sig[ie.m][h] : 0.0) + pint(y, ie.m, h));
      }
    }

    if (tg.fwm && !e.triples.empty()) {
      const bool averaged = spec.solver.fwm_mode == FwmEfficiencyMode::averaged;
      const bool til = tilted[e.group];
      const auto& s = sig[e.group];
      // averaged efficiencies take the local rate combination, the oscillatory
      // form takes the z-averaged exponent reconstruction
      const auto& at = averaged ? aloc[e.group] : atld[e.group];
      double sum = 0.0;
      for (const TripleTerm& t : e.triples) {
        double p3 = s[t.h] * s[t.k] * s[t.l];
        if (p3 == 0.0) continue;
        double da = til ? at[e.channel] - at[t.h] - at[t.k] - at[t.l] : t.dalpha;
        double rho;
        if (averaged) {
          double denom = da * da + 4.0 * t.dbeta * t.dbeta;
          if (denom == 0.0) continue;
          rho = 4.0 * da / denom;
        } else {
          rho = efficiency_exact({da, t.dbeta}, z);
        }
        sum += t.weight * p3 * rho;
      }
      r += e.fwm_pref * sum;
    }
    if (tg.fwm && e.img_fwm) r += img_fwm_rate(spec, tilt, e.group, e.channel, z);
    return r;
  }

  // Backward-pass RHS in the travel coordinate u (z = L_s - u): couplings act
  // on the backward state, SpRS/Rayleigh sources come from the frozen forward
  // pass; no backward classical signals means no backward FWM.
  double backward_rate(std::size_t i, const std::vector<double>& q, const SourceToggles& tg,
                       const std::function<double(int, int)>& fwd_int) const {
    const EqTerms& e = eqs[i];
    const int n_ch = spec.grid.count;
    double r = -aloc[e.group][e.channel] * q[i];

    for (const auto& x : e.xtalk) r += x.kappa * pint(q, x.m, e.channel);
    for (int h = 0; h < n_ch; ++h) {
      double eta = e.eta[h];
      if (eta == 0.0) continue;
      r += eta * pint(q, e.group, h);
      r += eta * ((tg.sprs ? sig[e.group][h] : 0.0) + fwd_int(e.group, h));
    }
    for (const auto& ie : e.img_eta) {
      for (int h = 0; h < n_ch; ++h) {
        double eta = ie.eta[h];
        if (eta == 0.0) continue;
        r += eta * pint(q, ie.m, h);
        r += eta * ((tg.sprs ? sig[ie.m][h] : 0.0) + fwd_int(ie.m, h));
      }
    }
    double gamma_r = spec.rayleigh[e.group][e.channel];
    if (gamma_r > 0.0)
      r += gamma_r *
           ((tg.rayleigh ? sig[e.group][e.channel] : 0.0) + fwd_int(e.group, e.channel));
    return r;
  }
};

void check_finite(const std::vector<double>& k, const Workspace& ws, double z) {
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i]))
      throw std::runtime_error("non-finite interference rate at z=" + std::to_string(z) +
                               " m, group=" + std::to_string(ws.eqs[i].group) +
                               ", channel=" + std::to_string(ws.eqs[i].channel));
  }
}

std::uint64_t clamp_negative(std::vector<double>& y) {
  std::uint64_t n = 0;
  for (double& v : y) {
    if (v < 0.0) {
      v = 0.0;
      ++n;
    }
  }
  return n;
}

// Fixed-step RK4 driver over the forward workspace equations; keeps every
// accepted step in the sample matrix.
void integrate_forward(Workspace& ws, int steps, double length, const SourceToggles& tg,
                       std::vector<double>& y, std::vector<std::vector<double>>& samples,
                       std::uint64_t& clamps) {
  const double h = length / steps;
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto eval = [&](double z, const std::vector<double>& state, std::vector<double>& out) {
    ws.prepare(z);
    for (std::size_t i = 0; i < n; ++i) out[i] = ws.rate(i, z, state, tg);
    check_finite(out, ws, z);
  };

  samples.push_back(y);
  for (int s = 0; s < steps; ++s) {
    double z = s * h;
    eval(z, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    clamps += clamp_negative(tmp);
    eval(z + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    clamps += clamp_negative(tmp);
    eval(z + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    clamps += clamp_negative(tmp);
    eval(z + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    clamps += clamp_negative(y);
    samples.push_back(y);
  }
}

TiltParams scenario_tilt(const Scenario& spec) {
  return spec.solver.img_terms ? img_tilt_params(spec) : fit_tilt(spec);
}

void require_validated(const Scenario& spec) {
  if (!spec.validated) throw std::logic_error("scenario must pass validate() before solving");
}

std::vector<double> initial_state(const Scenario& spec, const TiltParams& tilt,
                                  const std::vector<TrackedChannel>& tracked,
                                  const SourceToggles& tg) {
  std::vector<double> y(tracked.size(), 0.0);
  if (spec.solver.fwm_mode == FwmEfficiencyMode::averaged && tg.fwm) {
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      if (spec.group_power[tracked[i].group] <= 0.0) continue;
      y[i] = fwm_input_condition(spec, &tilt, tracked[i].group, tracked[i].channel, true);
    }
  }
  return y;
}

Scenario mirrored_if_backward(const Scenario& spec, bool& mirrored) {
  mirrored = false;
  bool any = false, all_backward = true;
  for (int g = 0; g < spec.group_count(); ++g) {
    if (spec.group_power[g] <= 0.0) continue;
    any = true;
    if (spec.launch.direction[g] != Direction::backward) all_backward = false;
  }
  if (!any || !all_backward) return spec;
  // Relabel the axis so the classical load propagates toward +z; the link has
  // no other z-asymmetry, so the solve is identical up to z -> L_s - z.
  Scenario flipped = spec;
  for (auto& d : flipped.launch.direction) d = Direction::forward;
  mirrored = true;
  return flipped;
}

}  // namespace

double interference_rate(const Scenario& spec, const TiltParams& tilt,
                         const std::vector<std::vector<double>>& p_int, int group, int channel,
                         double z, const SourceToggles& toggles) {
  require_validated(spec);
  std::vector<TrackedChannel> all;
  for (int g = 0; g < spec.group_count(); ++g)
    for (int c = 0; c < spec.grid.count; ++c) all.push_back({g, c});
  Workspace ws(spec, tilt, all);
  ws.prepare(z);
  std::vector<double> y(all.size(), 0.0);
  for (std::size_t i = 0; i < all.size(); ++i) y[i] = p_int[all[i].group][all[i].channel];
  int eq = ws.dense_index[group][channel];
  return ws.rate(static_cast<std::size_t>(eq), z, y, toggles);
}

SolveResult solve_forward(const Scenario& spec_in, const SourceToggles& toggles) {
  require_validated(spec_in);
  bool mirrored = false;
  Scenario spec = mirrored_if_backward(spec_in, mirrored);
  TiltParams tilt = scenario_tilt(spec);
  Workspace ws(spec, tilt, tracked_channels(spec));

  SolveResult res;
  res.tracked = ws.tracked;
  res.classical_backward = mirrored;
  res.settings = settings_hash(spec);
  const int steps = spec.solver.steps_per_span;
  const double length = spec.solver.span_length;

  std::vector<double> y = initial_state(spec, tilt, ws.tracked, toggles);
  integrate_forward(ws, steps, length, toggles, y, res.forward, res.clamp_count);
  res.z.resize(steps + 1);
  for (int s = 0; s <= steps; ++s) res.z[s] = length * s / steps;
  return res;
}

SolveResult solve_counter(const Scenario& spec_in, const SourceToggles& toggles) {
  require_validated(spec_in);
  if (spec_in.scheme != Scheme::counter)
    throw std::logic_error("solve_counter requires scheme = counter");
  bool mirrored = false;
  Scenario spec = mirrored_if_backward(spec_in, mirrored);
  TiltParams tilt = scenario_tilt(spec);
  Workspace ws(spec, tilt, tracked_channels(spec));

  const int steps = spec.solver.steps_per_span;
  const double length = spec.solver.span_length;

  SolveResult res;
  res.tracked = ws.tracked;
  res.classical_backward = mirrored;
  res.settings = settings_hash(spec);

  // Pass 1 at doubled resolution so every backward RK4 stage lands exactly on
  // a stored forward sample.
  std::vector<std::vector<double>> fine;
  std::vector<double> y = initial_state(spec, tilt, ws.tracked, toggles);
  integrate_forward(ws, 2 * steps, length, toggles, y, fine, res.clamp_count);

  // Pass 2: backward interference in the travel coordinate u = L_s - z,
  // boundary value zero at z = L_s.
  const double fine_dz = length / (2 * steps);
  std::vector<double> q(ws.tracked.size(), 0.0);
  std::vector<std::vector<double>> back_by_u;
  double current_z = 0.0;
  std::function<double(int, int)> fwd_int = [&](int g, int c) -> double {
    int t = ws.dense_index[g][c];
    if (t < 0) return 0.0;
    auto idx = static_cast<std::size_t>(std::llround(current_z / fine_dz));
    return fine[idx][t];
  };
  {
    const double h = length / steps;
    const std::size_t n = q.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto eval = [&](double u, const std::vector<double>& state, std::vector<double>& out) {
      double z = length - u;
      current_z = z;
      ws.prepare(z);
      for (std::size_t i = 0; i < n; ++i) out[i] = ws.backward_rate(i, state, toggles, fwd_int);
      check_finite(out, ws, z);
    };
    back_by_u.push_back(q);
    for (int s = 0; s < steps; ++s) {
      double u = s * h;
      eval(u, q, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * h * k1[i];
      res.clamp_count += clamp_negative(tmp);
      eval(u + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * h * k2[i];
      res.clamp_count += clamp_negative(tmp);
      eval(u + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + h * k3[i];
      res.clamp_count += clamp_negative(tmp);
      eval(u + h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      res.clamp_count += clamp_negative(q);
      back_by_u.push_back(q);
    }
  }

  // Report on the steps_per_span grid: forward downsampled from the fine
  // pass, backward re-indexed from travel coordinate to z.
  res.z.resize(steps + 1);
  res.forward.resize(steps + 1);
  res.backward.resize(steps + 1);
  for (int s = 0; s <= steps; ++s) {
    res.z[s] = length * s / steps;
    res.forward[s] = fine[2 * s];
    res.backward[s] = back_by_u[steps - s];
  }
  return res;
}

std::vector<double> rk4_step(const RateFn& rhs, const std::vector<double>& y, double z, double dz,
                             std::uint64_t* clamp_count) {
  if (dz <= 0.0) throw std::domain_error("rk4_step requires dz > 0");
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(y);
  std::uint64_t clamps = 0;

  auto check = [&](const std::vector<double>& k, double at) {
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(k[i]))
        throw std::runtime_error("non-finite rhs at z=" + std::to_string(at) +
                                 ", component=" + std::to_string(i));
  };
  rhs(z, y, k1);
  check(k1, z);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dz * k1[i];
  clamps += clamp_negative(tmp);
  rhs(z + 0.5 * dz, tmp, k2);
  check(k2, z + 0.5 * dz);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dz * k2[i];
  clamps += clamp_negative(tmp);
  rhs(z + 0.5 * dz, tmp, k3);
  check(k3, z + 0.5 * dz);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dz * k3[i];
  clamps += clamp_negative(tmp);
  rhs(z + dz, tmp, k4);
  check(k4, z + dz);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + dz / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  clamps += clamp_negative(out);
  if (clamp_count) *clamp_count += clamps;
  return out;
}

}  // namespace coexsim
