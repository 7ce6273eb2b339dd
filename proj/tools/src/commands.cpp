#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "coexsim/kinetics.hpp"
#include "coexsim/metrics.hpp"
#include "coexsim/oracle.hpp"
#include "coexsim/units.hpp"

namespace coexsim::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", v);  // 12 significant digits
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

struct SourceRuns {
  SolveResult total, sprs, fwm, xtalk, rayleigh;
};

SolveResult run_one(const Scenario& spec, const SourceToggles& tg) {
  return spec.scheme == Scheme::counter ? solve_counter(spec, tg) : solve_forward(spec, tg);
}

SourceRuns run_with_sources(const Scenario& spec) {
  SourceRuns r;
  r.total = run_one(spec, SourceToggles{});
  r.sprs = run_one(spec, SourceToggles{true, false, false, false});
  r.xtalk = run_one(spec, SourceToggles{false, true, false, false});
  r.rayleigh = run_one(spec, SourceToggles{false, false, true, false});
  r.fwm = run_one(spec, SourceToggles{false, false, false, true});
  return r;
}

// The sources superpose exactly; anything beyond rounding noise is a bug.
void check_breakdown(const SourceRuns& r) {
  auto check = [](const std::vector<std::vector<double>>& total,
                  const std::vector<std::vector<double>>& a,
                  const std::vector<std::vector<double>>& b,
                  const std::vector<std::vector<double>>& c,
                  const std::vector<std::vector<double>>& d) {
    for (std::size_t s = 0; s < total.size(); ++s)
      for (std::size_t t = 0; t < total[s].size(); ++t) {
        double sum = a[s][t] + b[s][t] + c[s][t] + d[s][t];
        double tot = total[s][t];
        if (std::abs(sum - tot) > 1e-9 * std::max(std::abs(tot), 1e-300))
          throw std::runtime_error("source breakdown does not sum to total (internal error)");
      }
  };
  check(r.total.forward, r.sprs.forward, r.fwm.forward, r.xtalk.forward, r.rayleigh.forward);
  if (!r.total.backward.empty())
    check(r.total.backward, r.sprs.backward, r.fwm.backward, r.xtalk.backward,
          r.rayleigh.backward);
}

std::string trajectory_csv(const Scenario& spec, const SourceRuns& r) {
  TiltParams tilt = spec.solver.img_terms ? img_tilt_params(spec) : fit_tilt(spec);
  std::string out =
      "z_km,group,channel,f_THz,direction,P_sig_W,P_int_W,P_int_sprs_W,P_int_fwm_W,"
      "P_int_xtalk_W,P_int_rayleigh_W,psd_mW_per_GHz\n";
  const SolveResult& tr = r.total;
  for (std::size_t s = 0; s < tr.z.size(); ++s) {
    double z = tr.z[s];
    for (std::size_t t = 0; t < tr.tracked.size(); ++t) {
      int g = tr.tracked[t].group, c = tr.tracked[t].channel;
      double sig = signal_profile(spec, tilt, g, c, z);
      double p = tr.forward[s][t];
      out += fmt(units::m_to_km(z)) + "," + std::to_string(g) + "," + std::to_string(c) + "," +
             fmt(units::hz_to_thz(spec.grid.frequency(c))) + ",F," + fmt(sig) + "," + fmt(p) +
             "," + fmt(r.sprs.forward[s][t]) + "," + fmt(r.fwm.forward[s][t]) + "," +
             fmt(r.xtalk.forward[s][t]) + "," + fmt(r.rayleigh.forward[s][t]) + "," +
             fmt(units::w_per_hz_to_mw_per_ghz(p / spec.grid.spacing)) + "\n";
      if (!tr.backward.empty()) {
        double pb = tr.backward[s][t];
        out += fmt(units::m_to_km(z)) + "," + std::to_string(g) + "," + std::to_string(c) + "," +
               fmt(units::hz_to_thz(spec.grid.frequency(c))) + ",B," + fmt(0.0) + "," + fmt(pb) +
               "," + fmt(r.sprs.backward[s][t]) + "," + fmt(r.fwm.backward[s][t]) + "," +
               fmt(r.xtalk.backward[s][t]) + "," + fmt(r.rayleigh.backward[s][t]) + "," +
               fmt(units::w_per_hz_to_mw_per_ghz(pb / spec.grid.spacing)) + "\n";
      }
    }
  }
  return out;
}

// Endpoint row per tracked channel: z = L_s forward, z = 0 backward.
std::string summary_csv(const Scenario& spec, const SourceRuns& r, const SolveResult& doubled) {
  std::string out =
      "group,channel,f_THz,direction,P_int_W,P_int_sprs_W,P_int_fwm_W,P_int_xtalk_W,"
      "P_int_rayleigh_W,psd_mW_per_GHz,qber,xi_snu,step_doubling_delta_dB\n";
  const SolveResult& tr = r.total;
  const std::size_t end = tr.z.size() - 1;
  for (std::size_t t = 0; t < tr.tracked.size(); ++t) {
    int g = tr.tracked[t].group, c = tr.tracked[t].channel;
    bool is_quantum = g == spec.grid.quantum_group && c == spec.grid.quantum_channel;
    auto row = [&](const char* dir, double p, double p_sprs, double p_fwm, double p_xt,
                   double p_ray, double p2) {
      MetricSet m = compute_metrics(spec, p);
      double conv = (p > 0.0 && p2 > 0.0) ? std::abs(units::ratio_db(p2, p)) : 0.0;
      out += std::to_string(g) + "," + std::to_string(c) + "," +
             fmt(units::hz_to_thz(spec.grid.frequency(c))) + "," + dir + "," + fmt(p) + "," +
             fmt(p_sprs) + "," + fmt(p_fwm) + "," + fmt(p_xt) + "," + fmt(p_ray) + "," +
             fmt(units::w_per_hz_to_mw_per_ghz(m.psd_w_per_hz)) + "," +
             (m.has_qber && is_quantum ? fmt(m.qber) : "") + "," +
             (m.has_xi && is_quantum ? fmt(m.xi_snu) : "") + "," + fmt(conv) + "\n";
    };
    row("F", tr.forward[end][t], r.sprs.forward[end][t], r.fwm.forward[end][t],
        r.xtalk.forward[end][t], r.rayleigh.forward[end][t], doubled.forward.back()[t]);
    if (!tr.backward.empty())
      row("B", tr.backward[0][t], r.sprs.backward[0][t], r.fwm.backward[0][t],
          r.xtalk.backward[0][t], r.rayleigh.backward[0][t], doubled.backward[0][t]);
  }
  return out;
}

void apply_axis(Scenario& s, const std::string& axis, const json& value) {
  if (axis == "quantum_channel_index") {
    s.grid.quantum_channel = value.get<int>();
  } else if (axis == "total_launch_dBm") {
    for (auto& t : s.launch.total_dbm)
      if (t) t = value.get<double>();
  } else if (axis == "span_km") {
    s.solver.span_length = units::km_to_m(value.get<double>());
  } else if (axis == "guard_channels") {
    s.grid.guard_channels = value.get<int>();
  } else if (axis == "scheme") {
    std::string v = value.get<std::string>();
    if (v == "co")
      s.scheme = Scheme::co;
    else if (v == "counter")
      s.scheme = Scheme::counter;
    else
      throw ParseError("sweep.values: scheme must be \"co\" or \"counter\"");
  } else {
    throw ParseError("sweep.axis: unknown axis '" + axis + "'");
  }
}

double quantum_value(const Scenario& spec, const SolveResult& r) {
  int t = r.index_of(spec.grid.quantum_group, spec.grid.quantum_channel);
  if (t < 0) return 0.0;
  return r.backward.empty() ? r.forward.back()[t] : r.backward[0][t];
}

}  // namespace

Scenario load_with_overrides(const std::string& path, const Options& opt) {
  Scenario s = parse_scenario_file(path);
  if (opt.steps) s.solver.steps_per_span = *opt.steps;
  if (opt.scheme) {
    if (*opt.scheme == "co")
      s.scheme = Scheme::co;
    else if (*opt.scheme == "counter")
      s.scheme = Scheme::counter;
    else
      throw ParseError("--scheme: expected co or counter");
  }
  if (opt.quantum_channel) s.grid.quantum_channel = *opt.quantum_channel;
  if (opt.guard_channels) s.grid.guard_channels = *opt.guard_channels;
  if (opt.fwm) {
    if (*opt.fwm == "averaged")
      s.solver.fwm_mode = FwmEfficiencyMode::averaged;
    else if (*opt.fwm == "exact")
      s.solver.fwm_mode = FwmEfficiencyMode::exact;
    else
      throw ParseError("--fwm: expected exact or averaged");
  }
  if (opt.track) {
    if (*opt.track == "full")
      s.solver.track_mode = TrackMode::full_grid;
    else if (*opt.track == "target")
      s.solver.track_mode = TrackMode::target_channel;
    else
      throw ParseError("--track: expected full or target");
  }
  if (opt.img) {
    if (*opt.img == "on")
      s.solver.img_terms = true;
    else if (*opt.img == "off")
      s.solver.img_terms = false;
    else
      throw ParseError("--img: expected on or off");
  }
  return s;
}

int cmd_run(const std::string& scenario_path, const Options& opt) {
  Scenario spec = validate(load_with_overrides(scenario_path, opt));
  for (const std::string& w : spec.warnings) std::cerr << "warning: " << w << "\n";

  SourceRuns runs = run_with_sources(spec);
  check_breakdown(runs);

  Scenario doubled_spec = spec;
  doubled_spec.solver.steps_per_span *= 2;
  SolveResult doubled = run_one(doubled_spec, SourceToggles{});

  fs::path out(opt.out_dir);
  atomic_write(out / "trajectory.csv", trajectory_csv(spec, runs));
  atomic_write(out / "summary.csv", summary_csv(spec, runs, doubled));
  return 0;
}

int cmd_sweep(const std::string& sweep_path, const Options& opt) {
  std::ifstream in(sweep_path);
  if (!in) throw ParseError("cannot open sweep file '" + sweep_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep document syntax error: ") + e.what());
  }
  if (!doc.contains("scenario")) throw ParseError("missing sweep.scenario");
  if (!doc.contains("axis")) throw ParseError("missing sweep.axis");
  if (!doc.contains("values") || !doc["values"].is_array() || doc["values"].empty())
    throw ParseError("sweep.values: expected a non-empty array");

  fs::path base_dir = fs::path(sweep_path).parent_path();
  std::string scenario_rel = doc["scenario"].get<std::string>();
  fs::path scenario_path =
      fs::path(scenario_rel).is_absolute() ? fs::path(scenario_rel) : base_dir / scenario_rel;
  std::string axis = doc["axis"].get<std::string>();
  json values = doc["values"];

  Scenario base = load_with_overrides(scenario_path.string(), opt);
  if (axis == "total_launch_dBm") {
    bool any = false;
    for (auto& t : base.launch.total_dbm) any = any || t.has_value();
    if (!any)
      throw ParseError("sweep.axis total_launch_dBm: scenario has no per-group launch totals");
  }

  struct Row {
    std::string value_text;
    std::string scheme;
    double total = 0, sprs = 0, fwm = 0, xtalk = 0, rayleigh = 0;
  };
  std::vector<Row> rows(values.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mutex;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= values.size() || failed.load()) break;
      try {
        Scenario s = base;
        apply_axis(s, axis, values[i]);
        Scenario v = validate(s);
        SourceRuns runs = run_with_sources(v);
        check_breakdown(runs);
        Row& row = rows[i];
        row.value_text =
            values[i].is_string() ? values[i].get<std::string>() : fmt(values[i].get<double>());
        row.scheme = v.scheme == Scheme::co ? "co" : "counter";
        row.total = quantum_value(v, runs.total);
        row.sprs = quantum_value(v, runs.sprs);
        row.fwm = quantum_value(v, runs.fwm);
        row.xtalk = quantum_value(v, runs.xtalk);
        row.rayleigh = quantum_value(v, runs.rayleigh);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };
  unsigned n_jobs = opt.jobs > 0 ? static_cast<unsigned>(opt.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  n_jobs = std::min<unsigned>(n_jobs, static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("sweep point failed: " + first_error);

  double spacing = base.grid.spacing;
  std::string out =
      "axis,value,scheme,P_int_W,P_int_sprs_W,P_int_fwm_W,P_int_xtalk_W,"
      "P_int_rayleigh_W,psd_mW_per_GHz\n";
  for (const Row& r : rows) {
    out += axis + "," + r.value_text + "," + r.scheme + "," + fmt(r.total) + "," + fmt(r.sprs) +
           "," + fmt(r.fwm) + "," + fmt(r.xtalk) + "," + fmt(r.rayleigh) + "," +
           fmt(units::w_per_hz_to_mw_per_ghz(r.total / spacing)) + "\n";
  }
  atomic_write(fs::path(opt.out_dir) / "sweep.csv", out);
  return 0;
}

int cmd_verify(const std::string& scenario_path, const Options& opt) {
  Scenario spec = validate(load_with_overrides(scenario_path, opt));
  if (spec.scheme != Scheme::co) {
    std::cerr << "verify supports co-propagating scenarios only\n";
    return 2;
  }
  if (opt.oracle_steps < 10L * spec.solver.steps_per_span) {
    std::cerr << "verify: oracle steps must be >= 10x the fast-path steps\n";
    return 2;
  }

  // Cost guard: the full-grid oracle walks every triple of every channel.
  double cost = 0.0;
  for (int g = 0; g < spec.group_count(); ++g) {
    if (spec.group_power[g] <= 0.0) continue;
    for (int c = 0; c < spec.grid.count; ++c)
      cost += static_cast<double>(enumerate_triples(spec.grid, g, c).size()) + spec.grid.count;
  }
  cost *= static_cast<double>(opt.oracle_steps);
  if (cost > opt.oracle_budget) {
    std::cerr << "verify: estimated oracle cost " << cost << " exceeds budget "
              << opt.oracle_budget << " (reduce channels/steps or raise --budget)\n";
    return 2;
  }

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  SolveResult fast = solve_forward(spec, SourceToggles{});
  auto t1 = clock::now();
  SolveResult ref = fine_step_reference(spec, opt.oracle_steps, spec.solver.steps_per_span + 1);
  auto t2 = clock::now();

  OracleReport report;
  report.target_steps = spec.solver.steps_per_span;
  report.reference_steps = opt.oracle_steps;
  report.target_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.reference_seconds = std::chrono::duration<double>(t2 - t1).count();

  int tf = fast.index_of(spec.grid.quantum_group, spec.grid.quantum_channel);
  int tr = ref.index_of(spec.grid.quantum_group, spec.grid.quantum_channel);
  for (std::size_t i = 0; i < ref.z.size(); ++i) {
    double z = ref.z[i];
    // In averaged mode the fast path deliberately starts at the FWM input
    // condition while the exact oracle starts at zero; z = 0 is not comparable.
    if (z == 0.0 && spec.solver.fwm_mode == FwmEfficiencyMode::averaged) continue;
    double pos = z / spec.solver.span_length * spec.solver.steps_per_span;
    auto j = static_cast<std::size_t>(std::llround(pos));
    if (j >= fast.z.size() || std::abs(fast.z[j] - z) > 1e-6 * spec.solver.span_length) continue;
    double pv = fast.forward[j][tf], pr = ref.forward[i][tr];
    OracleRow row;
    row.quantity = "P_int@z=" + fmt(units::m_to_km(z)) + "km";
    row.reference = pr;
    row.value = pv;
    row.abs_err = std::abs(pv - pr);
    row.rel_err = pr != 0.0 ? row.abs_err / std::abs(pr) : (pv == 0.0 ? 0.0 : HUGE_VAL);
    row.delta_db = (pr <= 0.0 && pv <= 0.0) ? 0.0 : units::ratio_db(pv, pr);
    report.rows.push_back(row);
  }

  double end_delta = report.rows.empty() ? 0.0 : std::abs(report.rows.back().delta_db);
  bool pass = end_delta <= opt.tolerance_db;

  fs::path out(opt.out_dir);
  atomic_write(out / "verify.csv", report.to_csv());
  std::string summary = report.summary(opt.tolerance_db);
  summary +=
      "speedup = " + fmt(report.reference_seconds / std::max(report.target_seconds, 1e-9)) + "x\n";
  atomic_write(out / "verify_summary.txt", summary);
  std::cout << summary;
  return pass ? 0 : 1;
}

}  // namespace coexsim::cli
