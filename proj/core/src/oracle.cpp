#include "coexsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "coexsim/profiles.hpp"
#include "coexsim/units.hpp"

namespace coexsim {

namespace {

// Pump-weighted Raman exchange rate for channel (g, c): the -d ln P / dz
// contribution beyond plain loss. Positive means net loss.
double raman_drain(const Scenario& spec, int g, int c,
                   const std::vector<std::vector<double>>& p_sig) {
  const RamanGainModel& model = spec.groups[g].raman_gain;
  double f_c = spec.grid.frequency(c);
  double gain = 0.0;
  for (int h = 0; h < spec.grid.count; ++h) {
    if (h == c) continue;
    double p = p_sig[g][h];
    if (p <= 0.0) continue;
    gain += model.signed_at(spec.grid.frequency(h) - f_c) * p;
  }
  if (spec.solver.img_terms) {
    for (int m = 0; m < spec.group_count(); ++m) {
      if (m == g) continue;
      const CouplingSpec::Pair* pair = spec.coupling.find(g, m);
      if (!pair || !pair->a_eff_cross || !spec.groups[g].a_eff) continue;
      double scale = *spec.groups[g].a_eff / *pair->a_eff_cross;
      for (int h = 0; h < spec.grid.count; ++h) {
        double p = p_sig[m][h];
        if (p <= 0.0) continue;
        gain += scale * model.signed_at(spec.grid.frequency(h) - f_c) * p;
      }
    }
  }
  return -gain;
}

}  // namespace

SrsTrajectory srs_coupled_solve(const Scenario& spec, long steps, int keep_samples) {
  if (!spec.validated) throw std::logic_error("scenario must pass validate() before solving");
  if (steps < 1) throw std::domain_error("srs_coupled_solve requires steps >= 1");
  const int n_g = spec.group_count(), n_ch = spec.grid.count;
  const double length = spec.solver.span_length;
  const double h = length / steps;
  const long stride = std::max<long>(1, steps / std::max(1, keep_samples - 1));

  std::vector<std::vector<double>> p = spec.launch.p_tx;
  auto rhs = [&](const std::vector<std::vector<double>>& state,
                 std::vector<std::vector<double>>& out) {
    for (int g = 0; g < n_g; ++g) {
      for (int c = 0; c < n_ch; ++c) {
        double pc = state[g][c];
        if (pc <= 0.0) {
          out[g][c] = 0.0;
          continue;
        }
        out[g][c] = (-spec.alpha[g][c] - raman_drain(spec, g, c, state)) * pc;
      }
    }
  };

  SrsTrajectory traj;
  auto record = [&](double z) {
    traj.z.push_back(z);
    traj.p.push_back(p);
  };
  record(0.0);

  std::vector<std::vector<double>> k1 = p, k2 = p, k3 = p, k4 = p, tmp = p;
  for (long s = 0; s < steps; ++s) {
    rhs(p, k1);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = p[g][c] + 0.5 * h * k1[g][c];
    rhs(tmp, k2);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = p[g][c] + 0.5 * h * k2[g][c];
    rhs(tmp, k3);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = p[g][c] + h * k3[g][c];
    rhs(tmp, k4);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) {
        p[g][c] += h / 6.0 * (k1[g][c] + 2.0 * k2[g][c] + 2.0 * k3[g][c] + k4[g][c]);
        if (!std::isfinite(p[g][c]))
          throw std::runtime_error("non-finite SRS state at step " + std::to_string(s));
      }
    if ((s + 1) % stride == 0 || s + 1 == steps) record((s + 1) * h);
  }
  return traj;
}

double effective_attenuation_from_profile(double p0, double pz, double z) {
  if (z <= 0.0) throw std::domain_error("effective attenuation requires z > 0");
  if (p0 <= 0.0 || pz <= 0.0)
    throw std::domain_error("effective attenuation requires positive powers");
  return -std::log(pz / p0) / z;
}

double efficiency_numeric(const std::function<double(double)>& loss_exponent, double delta_beta,
                          double z, long steps) {
  if (z < 0.0) throw std::domain_error("efficiency quadrature requires z >= 0");
  if (z == 0.0) return 0.0;
  long n = std::max<long>(steps, 2);
  if (n % 2 == 1) ++n;  // composite Simpson wants an even interval count
  const double h = z / n;
  const double l_end = loss_exponent(z);
  auto f = [&](double zp) {
    return std::exp(0.5 * (loss_exponent(zp) - l_end)) * std::cos(delta_beta * (z - zp));
  };
  double sum = f(0.0) + f(z);
  for (long i = 1; i < n; ++i) sum += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return 2.0 * sum * h / 3.0;
}

double efficiency_numeric(const Mismatch& m, double z, long steps) {
  double da = m.delta_alpha;
  return efficiency_numeric([da](double zp) { return da * zp; }, m.delta_beta, z, steps);
}

namespace {

// Joint state for the fine-step reference: per-channel loss exponents
// lambda = alpha_tilde * z (well defined also for empty slots), interference
// powers, and the complex coherent FWM integrals per triple.
struct OracleSystem {
  const Scenario& spec;
  int n_g, n_ch;
  std::vector<std::vector<double>> eta;        // [g][c * n_ch + h]
  struct TripleRef {
    int target;  // flat target index
    int h, k, l;
    double pref;  // weight * r^2 g^2 / D^2 * P0 products
    double dbeta;
  };
  std::vector<TripleRef> triples;
  std::vector<double> p0;  // flat launch powers

  // state layout: [lambda (G*N)] [p_int (G*N)] [I pairs (2*triples)]
  int n_lambda, n_pint;
  std::size_t state_size;

  explicit OracleSystem(const Scenario& s) : spec(s) {
    n_g = spec.group_count();
    n_ch = spec.grid.count;
    n_lambda = n_g * n_ch;
    n_pint = n_g * n_ch;
    p0.resize(n_lambda);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) p0[g * n_ch + c] = spec.launch.p_tx[g][c];

    eta.assign(n_g, std::vector<double>(static_cast<std::size_t>(n_ch) * n_ch, 0.0));
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c)
        for (int h = 0; h < n_ch; ++h) {
          if (h == c) continue;
          eta[g][static_cast<std::size_t>(c) * n_ch + h] =
              raman_cross_section(spec.grid.frequency(c), spec.grid.frequency(h),
                                  spec.launch.temperature, spec.grid.spacing,
                                  spec.groups[g].raman_gain);
        }

    for (int g = 0; g < n_g; ++g) {
      if (spec.group_power[g] <= 0.0 || spec.groups[g].gamma == 0.0) continue;
      double d = static_cast<double>(spec.groups[g].degenerate_modes);
      double pref_g = spec.r[g] * spec.r[g] * spec.groups[g].gamma * spec.groups[g].gamma / (d * d);
      for (int c = 0; c < n_ch; ++c) {
        for (const FwmTriple& t : enumerate_triples(spec.grid, g, c)) {
          double w = t.degenerate ? (spec.groups[g].kurtosis[t.h] + 2.0) : 2.0 * d;
          Mismatch m = triple_mismatch(spec, g, c, t);
          double prod = p0[g * n_ch + t.h] * p0[g * n_ch + t.k] * p0[g * n_ch + t.l];
          if (prod <= 0.0) continue;
          triples.push_back({g * n_ch + c, g * n_ch + t.h, g * n_ch + t.k, g * n_ch + t.l,
                             pref_g * w * prod, m.delta_beta});
        }
      }
    }
    state_size = static_cast<std::size_t>(n_lambda + n_pint) + 2 * triples.size();
  }

  void rhs(double z, const std::vector<double>& y, std::vector<double>& dy,
           std::vector<double>& sig_scratch) const {
    // signals from the loss exponents
    std::vector<double>& sig = sig_scratch;
    for (int i = 0; i < n_lambda; ++i)
      sig[i] = p0[i] > 0.0 ? p0[i] * std::exp(-y[i]) : 0.0;

    // d lambda / dz = alpha - raman pumping rate (skipped when tilt is off)
    for (int g = 0; g < n_g; ++g) {
      const RamanGainModel& model = spec.groups[g].raman_gain;
      for (int c = 0; c < n_ch; ++c) {
        double f_c = spec.grid.frequency(c);
        double drain = spec.alpha[g][c];
        if (spec.solver.tilt) {
          for (int h = 0; h < n_ch; ++h) {
            if (h == c) continue;
            double p = sig[g * n_ch + h];
            if (p > 0.0) drain -= model.signed_at(spec.grid.frequency(h) - f_c) * p;
          }
          if (spec.solver.img_terms) {
            for (int m = 0; m < n_g; ++m) {
              if (m == g) continue;
              const CouplingSpec::Pair* pair = spec.coupling.find(g, m);
              if (!pair || !pair->a_eff_cross || !spec.groups[g].a_eff) continue;
              double scale = *spec.groups[g].a_eff / *pair->a_eff_cross;
              for (int h = 0; h < n_ch; ++h) {
                double p = sig[m * n_ch + h];
                if (p > 0.0)
                  drain -= scale * model.signed_at(spec.grid.frequency(h) - f_c) * p;
              }
            }
          }
        }
        dy[g * n_ch + c] = drain;
      }
    }

    // interference equations
    for (int g = 0; g < n_g; ++g) {
      for (int c = 0; c < n_ch; ++c) {
        int idx = g * n_ch + c;
        const double* pint = y.data() + n_lambda;
        double r = -dy[idx] * pint[idx];  // local effective loss = d lambda / dz
        for (int m = 0; m < n_g; ++m) {
          if (m == g) continue;
          double kappa = crosstalk_at(spec.coupling, g, m, spec.grid.frequency(c));
          if (kappa > 0.0) r += kappa * (sig[m * n_ch + c] + pint[m * n_ch + c]);
        }
        const double* eta_row = eta[g].data() + static_cast<std::size_t>(c) * n_ch;
        for (int h = 0; h < n_ch; ++h) {
          double e = eta_row[h];
          if (e != 0.0) r += e * (sig[g * n_ch + h] + pint[g * n_ch + h]);
        }
        if (spec.solver.img_terms && spec.groups[g].a_eff) {
          for (int m = 0; m < n_g; ++m) {
            if (m == g) continue;
            const CouplingSpec::Pair* pair = spec.coupling.find(g, m);
            if (!pair || !pair->a_eff_cross) continue;
            double scale = *spec.groups[g].a_eff / *pair->a_eff_cross;
            for (int h = 0; h < n_ch; ++h) {
              if (h == c) continue;
              double e = eta_row[h] * scale;
              if (e != 0.0) r += e * (sig[m * n_ch + h] + pint[m * n_ch + h]);
            }
          }
        }
        dy[n_lambda + idx] = r;
      }
    }

    // coherent FWM integrals and their power contribution
    const double* iq = y.data() + n_lambda + n_pint;
    double* diq = dy.data() + n_lambda + n_pint;
    for (std::size_t t = 0; t < triples.size(); ++t) {
      const TripleRef& tr = triples[t];
      double dl = y[tr.target] - y[tr.h] - y[tr.k] - y[tr.l];  // -delta_alpha_tilde * z
      double mag = std::exp(0.5 * dl);
      double phase = tr.dbeta * z;
      double gr = mag * std::cos(phase), gi = mag * std::sin(phase);
      diq[2 * t] = gr;
      diq[2 * t + 1] = gi;
      // d/dz of |I|^2 e^{-lambda_i} minus the loss part already applied above:
      // source = pref * 2 Re(conj(I) g) e^{-lambda_i}
      double re = iq[2 * t], im = iq[2 * t + 1];
      dy[n_lambda + tr.target] +=
          tr.pref * 2.0 * (re * gr + im * gi) * std::exp(-y[tr.target]);
    }
  }
};

}  // namespace

namespace {

// Loss exponents lambda_{g,c}(z) = alpha_tilde z at panel nodes, by RK4 on
// d lambda/dz = alpha - raman pumping (plain alpha z when tilt is off). The
// pumping rate is power-independent, so empty slots are covered too.
std::vector<std::vector<std::vector<double>>> loss_exponent_grid(const Scenario& spec, double z,
                                                                 long panels) {
  const int n_g = spec.group_count(), n_ch = spec.grid.count;
  const double h = z / panels;
  std::vector<std::vector<double>> lam(n_g, std::vector<double>(n_ch, 0.0));
  std::vector<std::vector<std::vector<double>>> grid;
  grid.reserve(panels + 1);
  grid.push_back(lam);

  std::vector<std::vector<double>> sig(n_g, std::vector<double>(n_ch, 0.0));
  auto rhs = [&](const std::vector<std::vector<double>>& state,
                 std::vector<std::vector<double>>& out) {
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) {
        double p0 = spec.launch.p_tx[g][c];
        sig[g][c] = p0 > 0.0 ? p0 * std::exp(-state[g][c]) : 0.0;
      }
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c)
        out[g][c] = spec.alpha[g][c] + (spec.solver.tilt ? raman_drain(spec, g, c, sig) : 0.0);
  };

  std::vector<std::vector<double>> k1 = lam, k2 = lam, k3 = lam, k4 = lam, tmp = lam;
  for (long s = 0; s < panels; ++s) {
    rhs(lam, k1);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = lam[g][c] + 0.5 * h * k1[g][c];
    rhs(tmp, k2);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = lam[g][c] + 0.5 * h * k2[g][c];
    rhs(tmp, k3);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c) tmp[g][c] = lam[g][c] + h * k3[g][c];
    rhs(tmp, k4);
    for (int g = 0; g < n_g; ++g)
      for (int c = 0; c < n_ch; ++c)
        lam[g][c] += h / 6.0 * (k1[g][c] + 2.0 * k2[g][c] + 2.0 * k3[g][c] + k4[g][c]);
    grid.push_back(lam);
  }
  return grid;
}

}  // namespace

double fwm_power_quadrature(const Scenario& spec, int group, int target, double z, long steps) {
  if (!spec.validated) throw std::logic_error("scenario must pass validate() before solving");
  if (steps < 2) throw std::domain_error("fwm_power_quadrature requires steps >= 2");
  if (z <= 0.0) return 0.0;
  const long panels = steps;
  const double h = z / panels;
  auto lambda = loss_exponent_grid(spec, z, panels);

  const ModeGroupSpec& mg = spec.groups[group];
  double d = static_cast<double>(mg.degenerate_modes);
  double pref_g = spec.r[group] * spec.r[group] * mg.gamma * mg.gamma / (d * d);
  const auto& p0 = spec.launch.p_tx[group];
  const double lam_end = lambda[panels][group][target];

  double total = 0.0;
  for (const FwmTriple& t : enumerate_triples(spec.grid, group, target)) {
    double prod = p0[t.h] * p0[t.k] * p0[t.l];
    if (prod <= 0.0) continue;
    Mismatch m = triple_mismatch(spec, group, target, t);
    double w = t.degenerate ? (mg.kurtosis[t.h] + 2.0) : 2.0 * d;

    // Filon-type panels: the slowly varying half-exponent is affine on each
    // panel, the e^{j db z} phase integrates in closed form, so arbitrarily
    // fast oscillations never alias.
    std::complex<double> acc(0.0, 0.0);
    auto half_dl = [&](long i) {
      const auto& lg = lambda[i][group];
      return 0.5 * (lg[target] - lg[t.h] - lg[t.k] - lg[t.l]);
    };
    double e_a = half_dl(0);
    for (long i = 0; i < panels; ++i) {
      double za = i * h;
      double e_b = half_dl(i + 1);
      double c1 = (e_b - e_a) / h;
      std::complex<double> s(c1, m.delta_beta);
      std::complex<double> seg;
      if (std::abs(s) * h < 1e-8) {
        seg = h * std::exp(e_a);  // flat panel limit
      } else {
        // int_za^zb e^{e_a + c1 (z' - za)} e^{j db z'} dz'
        std::complex<double> phase_a(0.0, m.delta_beta * za);
        seg = std::exp(e_a + phase_a) * (std::exp(s * h) - 1.0) / s;
      }
      acc += seg;
      e_a = e_b;
    }
    total += pref_g * w * prod * std::norm(acc) * std::exp(-lam_end);
  }
  return total;
}

SolveResult fine_step_reference(const Scenario& spec, long steps, int keep_samples) {
  if (!spec.validated) throw std::logic_error("scenario must pass validate() before solving");
  if (spec.solver.track_mode != TrackMode::full_grid) {
    Scenario full = spec;
    full.solver.track_mode = TrackMode::full_grid;
    return fine_step_reference(full, steps, keep_samples);
  }
  OracleSystem sys(spec);
  const double length = spec.solver.span_length;
  const double h = length / steps;
  const long stride = std::max<long>(1, steps / std::max(1, keep_samples - 1));

  std::vector<double> y(sys.state_size, 0.0), scratch(sys.n_lambda, 0.0);
  std::vector<double> k1(sys.state_size), k2(sys.state_size), k3(sys.state_size),
      k4(sys.state_size), tmp(sys.state_size);

  SolveResult res;
  for (int g = 0; g < sys.n_g; ++g)
    for (int c = 0; c < sys.n_ch; ++c) res.tracked.push_back({g, c});
  res.settings = settings_hash(spec);

  auto record = [&](double z) {
    res.z.push_back(z);
    std::vector<double> row(sys.n_pint);
    for (int i = 0; i < sys.n_pint; ++i) row[i] = y[sys.n_lambda + i];
    res.forward.push_back(std::move(row));
  };
  record(0.0);

  auto clamp_pint = [&](std::vector<double>& state) {
    for (int i = 0; i < sys.n_pint; ++i) {
      double& v = state[sys.n_lambda + i];
      if (v < 0.0) {
        v = 0.0;
        ++res.clamp_count;
      }
    }
  };

  for (long s = 0; s < steps; ++s) {
    double z = s * h;
    sys.rhs(z, y, k1, scratch);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    clamp_pint(tmp);
    sys.rhs(z + 0.5 * h, tmp, k2, scratch);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    clamp_pint(tmp);
    sys.rhs(z + 0.5 * h, tmp, k3, scratch);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    clamp_pint(tmp);
    sys.rhs(z + h, tmp, k4, scratch);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    clamp_pint(y);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!std::isfinite(y[i]))
        throw std::runtime_error("non-finite oracle state at z=" + std::to_string(z + h));
    if ((s + 1) % stride == 0 || s + 1 == steps) record((s + 1) * h);
  }
  return res;
}

double OracleReport::max_abs_delta_db() const {
  double m = 0.0;
  for (const OracleRow& r : rows) m = std::max(m, std::abs(r.delta_db));
  return m;
}

std::string OracleReport::to_csv() const {
  std::string out = "quantity,reference,value,abs_err,rel_err,delta_dB\n";
  char buf[256];
  for (const OracleRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.11e,%.11e,%.11e,%.11e,%.11e\n", r.quantity.c_str(),
                  r.reference, r.value, r.abs_err, r.rel_err, r.delta_db);
    out += buf;
  }
  return out;
}

std::string OracleReport::summary(double tolerance_db) const {
  char buf[512];
  double end_delta = rows.empty() ? 0.0 : std::abs(rows.back().delta_db);
  bool pass = end_delta <= tolerance_db;
  std::snprintf(buf, sizeof(buf),
                "oracle steps=%ld (%.2f s), fast steps=%ld (%.4f s)\n"
                "trajectory max |delta| = %.4f dB, endpoint delta = %.4f dB, tolerance = %.4f dB "
                "-> %s\n",
                reference_steps, reference_seconds, target_steps, target_seconds,
                max_abs_delta_db(), end_delta, tolerance_db, pass ? "PASS" : "FAIL");
  return buf;
}

}  // namespace coexsim
