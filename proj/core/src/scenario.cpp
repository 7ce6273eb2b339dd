#include "coexsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coexsim/units.hpp"

namespace coexsim {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const json* find(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& req(const json& obj, const char* key, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) throw ParseError("missing " + (path.empty() ? std::string(key) : path + "." + key));
  return *v;
}

double num(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ParseError(path + ": expected a boolean");
  return v.get<bool>();
}

std::string str(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a string");
  return v.get<std::string>();
}

using Conv = double (*)(double);

std::vector<std::pair<double, double>> read_samples(const json& arr, const std::string& path,
                                                    double f_scale, Conv conv) {
  if (!arr.is_array() || arr.empty()) throw ParseError(path + ": expected a non-empty array");
  std::vector<std::pair<double, double>> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& row = arr[i];
    std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != 2) throw ParseError(rp + ": expected [frequency, value]");
    out.emplace_back(num(row[0], rp) * f_scale, conv(num(row[1], rp)));
  }
  return out;
}

std::vector<std::pair<double, double>> read_csv_samples(const std::string& file,
                                                        const std::string& path, Conv conv) {
  auto raw = load_profile_csv(file);
  std::vector<std::pair<double, double>> out;
  out.reserve(raw.size());
  for (auto& [thz, v] : raw) out.emplace_back(units::thz_to_hz(thz), conv(v));
  if (out.empty()) throw ParseError(path + ": profile csv '" + file + "' has no rows");
  return out;
}

double identity(double v) { return v; }

// A spectral quantity given as a constant, an inline sample array, or a CSV
// reference. Engineering keys take THz frequencies, SI keys take Hz.
SpectralProfile read_profile(const json& j, const std::string& path, const std::string& base_dir,
                             const char* const_eng, Conv conv_eng, const char* const_si,
                             const char* samples_eng, const char* samples_si) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  if (const json* v = find(j, const_eng)) return SpectralProfile::constant(conv_eng(num(*v, path)));
  if (const json* v = find(j, const_si)) return SpectralProfile::constant(num(*v, path));
  if (const json* v = find(j, samples_eng))
    return SpectralProfile(read_samples(*v, path, 1e12, conv_eng));
  if (const json* v = find(j, samples_si))
    return SpectralProfile(read_samples(*v, path, 1.0, identity));
  if (const json* v = find(j, "profile_csv")) {
    fs::path p = fs::path(base_dir) / str(*v, path + ".profile_csv");
    return SpectralProfile(read_csv_samples(p.string(), path, conv_eng));
  }
  throw ParseError(path + ": expected one of " + const_eng + ", " + samples_eng +
                   ", profile_csv (or SI variants)");
}

RamanGainModel read_raman(const json& j, const std::string& path, const std::string& base_dir) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  RamanGainModel model;
  if (const json* v = find(j, "samples_per_W_km")) {
    model.table = SpectralProfile(read_samples(*v, path, 1e12, units::per_w_km_to_per_w_m));
    return model;
  }
  if (const json* v = find(j, "samples_per_W_m")) {
    model.table = SpectralProfile(read_samples(*v, path, 1.0, identity));
    return model;
  }
  if (const json* v = find(j, "profile_csv")) {
    fs::path p = fs::path(base_dir) / str(*v, path + ".profile_csv");
    model.table = SpectralProfile(read_csv_samples(p.string(), path, units::per_w_km_to_per_w_m));
    return model;
  }
  if (const json* v = find(j, "slope_per_W_km_THz"))
    model.slope = units::raman_slope_to_si(num(*v, path + ".slope_per_W_km_THz"));
  else if (const json* v2 = find(j, "slope_per_W_m_Hz"))
    model.slope = num(*v2, path + ".slope_per_W_m_Hz");
  else
    throw ParseError(path + ": expected slope_per_W_km_THz or a tabulated profile");
  if (const json* v = find(j, "peak_per_W_km"))
    model.peak = units::per_w_km_to_per_w_m(num(*v, path + ".peak_per_W_km"));
  else if (const json* v2 = find(j, "peak_per_W_m"))
    model.peak = num(*v2, path + ".peak_per_W_m");
  return model;
}

Direction read_direction(const json& v, const std::string& path) {
  std::string s = str(v, path);
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  throw ParseError(path + ": expected \"forward\" or \"backward\"");
}

json profile_to_json(const SpectralProfile& p, const char* samples_si_key) {
  json arr = json::array();
  for (auto& [f, v] : p.samples()) arr.push_back(json::array({f, v}));
  return json{{samples_si_key, arr}};
}

}  // namespace

const SpectralProfile* CouplingSpec::kappa_profile(int to_group, int from_group) const {
  const Pair* p = find(to_group, from_group);
  return p ? &p->kappa : nullptr;
}

const CouplingSpec::Pair* CouplingSpec::find(int to_group, int from_group) const {
  for (const Pair& p : pairs)
    if (p.to_group == to_group && p.from_group == from_group) return &p;
  return nullptr;
}

bool Scenario::operator==(const Scenario& o) const {
  return name == o.name && scheme == o.scheme && grid == o.grid && groups == o.groups &&
         coupling == o.coupling && launch == o.launch && solver == o.solver &&
         receiver == o.receiver;
}

std::vector<std::pair<double, double>> load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile csv '" + path + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) continue;  // header
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected frequency_THz,value");
    try {
      rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

ChannelGrid build_grid(double f_min, double spacing, int count, int guard_channels,
                       int quantum_group, int quantum_channel, int group_count,
                       const std::vector<bool>& group_has_power, bool notch) {
  if (count < 1) throw ValidationError("grid.channels: must be >= 1");
  if (spacing <= 0.0) throw ValidationError("grid.spacing: must be > 0");
  if (guard_channels < 0) throw ValidationError("grid.guard_channels: must be >= 0");
  if (quantum_group < 0 || quantum_group >= group_count)
    throw ValidationError("grid.quantum.group: out of range");
  if (quantum_channel < 0 || quantum_channel >= count)
    throw ValidationError("grid.quantum.channel: out of range");

  ChannelGrid grid;
  grid.f_min = f_min;
  grid.spacing = spacing;
  grid.count = count;
  grid.quantum_group = quantum_group;
  grid.quantum_channel = quantum_channel;
  grid.guard_channels = guard_channels;
  grid.notch = notch;
  grid.allocation.assign(group_count, std::vector<std::uint8_t>(count, 0));
  for (int g = 0; g < group_count; ++g) {
    if (!group_has_power[g]) continue;
    for (int c = 0; c < count; ++c) grid.allocation[g][c] = 1;
    if (g == quantum_group || notch) grid.allocation[g][quantum_channel] = 0;
    for (int off = 1; off <= guard_channels; ++off) {
      if (quantum_channel - off >= 0) grid.allocation[g][quantum_channel - off] = 0;
      if (quantum_channel + off < count) grid.allocation[g][quantum_channel + off] = 0;
    }
  }
  return grid;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("document syntax error at line " +
                     std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("document root must be an object");
  if (!find(doc, "mode_groups")) throw ParseError("missing mode_groups");

  Scenario s;
  if (const json* v = find(doc, "name")) s.name = str(*v, "name");
  if (const json* v = find(doc, "scheme")) {
    std::string sch = str(*v, "scheme");
    if (sch == "co")
      s.scheme = Scheme::co;
    else if (sch == "counter")
      s.scheme = Scheme::counter;
    else
      throw ParseError("scheme: expected \"co\" or \"counter\"");
  }

  // grid
  const json& grid = req(doc, "grid", "");
  if (const json* v = find(grid, "f_min_THz"))
    s.grid.f_min = units::thz_to_hz(num(*v, "grid.f_min_THz"));
  else
    s.grid.f_min = num(req(grid, "f_min_Hz", "grid"), "grid.f_min_Hz");
  if (const json* v = find(grid, "spacing_GHz"))
    s.grid.spacing = units::ghz_to_hz(num(*v, "grid.spacing_GHz"));
  else
    s.grid.spacing = num(req(grid, "spacing_Hz", "grid"), "grid.spacing_Hz");
  s.grid.count = integer(req(grid, "channels", "grid"), "grid.channels");
  const json& q = req(grid, "quantum", "grid");
  s.grid.quantum_group = integer(req(q, "group", "grid.quantum"), "grid.quantum.group");
  s.grid.quantum_channel = integer(req(q, "channel", "grid.quantum"), "grid.quantum.channel");
  if (const json* v = find(grid, "guard_channels"))
    s.grid.guard_channels = integer(*v, "grid.guard_channels");
  if (const json* v = find(grid, "notch")) s.grid.notch = boolean(*v, "grid.notch");

  // mode groups
  const json* groups = find(doc, "mode_groups");
  if (!groups || !groups->is_array() || groups->empty()) throw ParseError("missing mode_groups");
  for (std::size_t gi = 0; gi < groups->size(); ++gi) {
    const json& g = (*groups)[gi];
    std::string gp = "mode_groups[" + std::to_string(gi) + "]";
    ModeGroupSpec mg;
    if (const json* v = find(g, "name")) mg.name = str(*v, gp + ".name");
    mg.degenerate_modes = integer(req(g, "degenerate_modes", gp), gp + ".degenerate_modes");
    if (const json* v = find(g, "gamma_per_W_km"))
      mg.gamma = units::per_w_km_to_per_w_m(num(*v, gp + ".gamma_per_W_km"));
    else
      mg.gamma = num(req(g, "gamma_per_W_m", gp), gp + ".gamma_per_W_m");
    mg.raman_fraction = num(req(g, "raman_fraction", gp), gp + ".raman_fraction");
    if (const json* v = find(g, "beta2_ps2_per_km"))
      mg.beta2 = units::ps2_per_km_to_si(num(*v, gp + ".beta2_ps2_per_km"));
    else
      mg.beta2 = num(req(g, "beta2_s2_per_m", gp), gp + ".beta2_s2_per_m");
    mg.attenuation =
        read_profile(req(g, "attenuation", gp), gp + ".attenuation", base_dir,
                     "constant_dB_per_km", units::db_per_km_to_per_m, "constant_per_m",
                     "samples_dB_per_km", "samples_per_m");
    mg.raman_gain = read_raman(req(g, "raman_gain", gp), gp + ".raman_gain", base_dir);
    if (const json* v = find(g, "rayleigh"))
      mg.rayleigh = read_profile(*v, gp + ".rayleigh", base_dir, "constant_per_km",
                                 units::per_km_to_per_m, "constant_per_m", "samples_per_km",
                                 "samples_per_m");
    else
      mg.rayleigh = SpectralProfile::constant(0.0);
    if (const json* v = find(g, "kurtosis")) {
      if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i)
          mg.kurtosis.push_back(num((*v)[i], gp + ".kurtosis[" + std::to_string(i) + "]"));
      } else {
        mg.kurtosis.assign(static_cast<std::size_t>(std::max(s.grid.count, 1)),
                           num(*v, gp + ".kurtosis"));
      }
    } else {
      mg.kurtosis.assign(static_cast<std::size_t>(std::max(s.grid.count, 1)), 0.0);
    }
    if (const json* v = find(g, "effective_area_um2"))
      mg.a_eff = units::um2_to_m2(num(*v, gp + ".effective_area_um2"));
    else if (const json* v2 = find(g, "effective_area_m2"))
      mg.a_eff = num(*v2, gp + ".effective_area_m2");
    s.groups.push_back(std::move(mg));
  }

  // coupling
  if (const json* c = find(doc, "coupling")) {
    if (const json* v = find(*c, "include_depletion"))
      s.coupling.include_depletion = boolean(*v, "coupling.include_depletion");
    if (const json* pairs = find(*c, "pairs")) {
      if (!pairs->is_array()) throw ParseError("coupling.pairs: expected an array");
      for (std::size_t pi = 0; pi < pairs->size(); ++pi) {
        const json& p = (*pairs)[pi];
        std::string pp = "coupling.pairs[" + std::to_string(pi) + "]";
        CouplingSpec::Pair pair;
        pair.to_group = integer(req(p, "to_group", pp), pp + ".to_group");
        pair.from_group = integer(req(p, "from_group", pp), pp + ".from_group");
        pair.kappa = read_profile(req(p, "crosstalk", pp), pp + ".crosstalk", base_dir,
                                  "constant_dB_per_km", units::crosstalk_db_per_km_to_per_m,
                                  "constant_per_m", "samples_dB_per_km", "samples_per_m");
        if (const json* v = find(p, "cross_effective_area_um2"))
          pair.a_eff_cross = units::um2_to_m2(num(*v, pp + ".cross_effective_area_um2"));
        else if (const json* v2 = find(p, "cross_effective_area_m2"))
          pair.a_eff_cross = num(*v2, pp + ".cross_effective_area_m2");
        if (const json* v = find(p, "fwm_overlap")) pair.fwm_overlap = num(*v, pp + ".fwm_overlap");
        s.coupling.pairs.push_back(std::move(pair));
      }
    }
  }

  // launch
  const json& launch = req(doc, "launch", "");
  if (const json* v = find(launch, "temperature_K"))
    s.launch.temperature = num(*v, "launch.temperature_K");
  s.launch.total_dbm.assign(s.groups.size(), std::nullopt);
  s.launch.per_channel_dbm.assign(s.groups.size(), std::nullopt);
  if (const json* v = find(launch, "total_dBm")) {
    if (!v->is_array()) throw ParseError("launch.total_dBm: expected an array (one entry per group)");
    if (v->size() != s.groups.size())
      throw ParseError("launch.total_dBm: length must match mode_groups");
    for (std::size_t i = 0; i < v->size(); ++i)
      if (!(*v)[i].is_null())
        s.launch.total_dbm[i] = num((*v)[i], "launch.total_dBm[" + std::to_string(i) + "]");
  }
  if (const json* v = find(launch, "per_channel_dBm")) {
    if (!v->is_array() || v->size() != s.groups.size())
      throw ParseError("launch.per_channel_dBm: expected one array per group");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if ((*v)[i].is_null()) continue;
      std::string lp = "launch.per_channel_dBm[" + std::to_string(i) + "]";
      if (!(*v)[i].is_array()) throw ParseError(lp + ": expected an array");
      std::vector<double> row;
      for (std::size_t k = 0; k < (*v)[i].size(); ++k)
        row.push_back(num((*v)[i][k], lp + "[" + std::to_string(k) + "]"));
      s.launch.per_channel_dbm[i] = std::move(row);
    }
  }
  s.launch.direction.assign(s.groups.size(), Direction::forward);
  if (const json* v = find(launch, "direction")) {
    if (!v->is_array() || v->size() != s.groups.size())
      throw ParseError("launch.direction: expected one entry per group");
    for (std::size_t i = 0; i < v->size(); ++i)
      s.launch.direction[i] =
          read_direction((*v)[i], "launch.direction[" + std::to_string(i) + "]");
  }

  // solver
  if (const json* sol = find(doc, "solver")) {
    if (const json* v = find(*sol, "steps_per_span"))
      s.solver.steps_per_span = integer(*v, "solver.steps_per_span");
    if (const json* v = find(*sol, "span_km"))
      s.solver.span_length = units::km_to_m(num(*v, "solver.span_km"));
    else if (const json* v2 = find(*sol, "span_m"))
      s.solver.span_length = num(*v2, "solver.span_m");
    if (const json* v = find(*sol, "fwm")) {
      std::string m = str(*v, "solver.fwm");
      if (m == "averaged")
        s.solver.fwm_mode = FwmEfficiencyMode::averaged;
      else if (m == "exact")
        s.solver.fwm_mode = FwmEfficiencyMode::exact;
      else
        throw ParseError("solver.fwm: expected \"averaged\" or \"exact\"");
    }
    if (const json* v = find(*sol, "track")) {
      std::string m = str(*v, "solver.track");
      if (m == "target")
        s.solver.track_mode = TrackMode::target_channel;
      else if (m == "full")
        s.solver.track_mode = TrackMode::full_grid;
      else
        throw ParseError("solver.track: expected \"target\" or \"full\"");
    }
    if (const json* v = find(*sol, "tilt")) s.solver.tilt = boolean(*v, "solver.tilt");
    if (const json* v = find(*sol, "n_R")) s.solver.n_r = integer(*v, "solver.n_R");
    if (const json* v = find(*sol, "img_terms"))
      s.solver.img_terms = boolean(*v, "solver.img_terms");
    if (const json* v = find(*sol, "backward_fwm")) {
      std::string m = str(*v, "solver.backward_fwm");
      if (m == "averaged")
        s.solver.backward_fwm = FwmEfficiencyMode::averaged;
      else if (m == "exact")
        s.solver.backward_fwm = FwmEfficiencyMode::exact;
      else
        throw ParseError("solver.backward_fwm: expected \"averaged\" or \"exact\"");
    }
  }

  // receiver (optional)
  if (const json* rec = find(doc, "receiver")) {
    ReceiverSpec r;
    if (const json* v = find(*rec, "signal_rate_per_s"))
      r.signal_rate = num(*v, "receiver.signal_rate_per_s");
    if (const json* v = find(*rec, "detector_bandwidth_GHz"))
      r.detector_bandwidth = units::ghz_to_hz(num(*v, "receiver.detector_bandwidth_GHz"));
    else if (const json* v2 = find(*rec, "detector_bandwidth_Hz"))
      r.detector_bandwidth = num(*v2, "receiver.detector_bandwidth_Hz");
    if (const json* v = find(*rec, "detector_efficiency"))
      r.detector_efficiency = num(*v, "receiver.detector_efficiency");
    if (const json* v = find(*rec, "lo_shot_variance_W"))
      r.lo_shot_variance = num(*v, "receiver.lo_shot_variance_W");
    s.receiver = r;
  }

  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), fs::path(path).parent_path().string());
}

Scenario validate(Scenario s) {
  const int n_groups = s.group_count();
  if (n_groups == 0) throw ValidationError("mode_groups: at least one group required");
  const int n_ch = s.grid.count;
  if (n_ch < 1) throw ValidationError("grid.channels: must be >= 1");
  if (s.grid.spacing <= 0.0) throw ValidationError("grid.spacing: must be > 0");
  if (s.launch.temperature <= 0.0) throw ValidationError("launch.temperature_K: must be > 0");
  if (s.solver.steps_per_span < 1) throw ValidationError("solver.steps_per_span: must be >= 1");
  if (s.solver.span_length <= 0.0) throw ValidationError("solver.span_km: must be > 0");
  if (s.solver.n_r < 1) throw ValidationError("solver.n_R: must be >= 1");

  // Which groups carry classical power at all.
  std::vector<bool> has_power(n_groups, false);
  for (int g = 0; g < n_groups; ++g)
    has_power[g] = s.launch.total_dbm[g].has_value() || s.launch.per_channel_dbm[g].has_value();

  s.grid = build_grid(s.grid.f_min, s.grid.spacing, n_ch, s.grid.guard_channels,
                      s.grid.quantum_group, s.grid.quantum_channel, n_groups, has_power,
                      s.grid.notch);

  s.r.assign(n_groups, 1.0);
  s.alpha.assign(n_groups, std::vector<double>(n_ch, 0.0));
  s.rayleigh.assign(n_groups, std::vector<double>(n_ch, 0.0));
  s.launch.p_tx.assign(n_groups, std::vector<double>(n_ch, 0.0));
  s.group_power.assign(n_groups, 0.0);
  s.warnings.clear();

  for (int g = 0; g < n_groups; ++g) {
    const ModeGroupSpec& mg = s.groups[g];
    std::string gp = "mode_groups[" + std::to_string(g) + "]";
    if (mg.degenerate_modes < 1) throw ValidationError(gp + ".degenerate_modes: must be >= 1");
    if (mg.gamma < 0.0) throw ValidationError(gp + ".gamma: must be >= 0");
    if (mg.raman_fraction < 0.0 || mg.raman_fraction > 1.0)
      throw ValidationError(gp + ".raman_fraction: must be in [0, 1]");
    for (auto& [f, v] : mg.attenuation.samples())
      if (v <= 0.0) throw ValidationError(gp + ".attenuation: all samples must be > 0");
    for (auto& [f, v] : mg.rayleigh.samples())
      if (v < 0.0) throw ValidationError(gp + ".rayleigh: samples must be >= 0");
    if (mg.raman_gain.table) {
      for (auto& [f, v] : mg.raman_gain.table->samples())
        if (v < 0.0) throw ValidationError(gp + ".raman_gain: samples must be >= 0");
      if (mg.raman_gain.table->at(0.0) != 0.0)
        throw ValidationError(gp + ".raman_gain: tabulated g_R must vanish at zero shift");
    } else {
      if (mg.raman_gain.slope < 0.0) throw ValidationError(gp + ".raman_gain.slope: must be >= 0");
      if (mg.raman_gain.peak < 0.0) throw ValidationError(gp + ".raman_gain.peak: must be >= 0");
    }
    if (static_cast<int>(mg.kurtosis.size()) == 1 && n_ch > 1)
      s.groups[g].kurtosis.assign(n_ch, mg.kurtosis[0]);
    if (static_cast<int>(s.groups[g].kurtosis.size()) != n_ch)
      throw ValidationError(gp + ".kurtosis: needs one value per channel");
    s.r[g] = nonlinear_scaling_factor(mg.degenerate_modes, mg.raman_fraction);
  }

  for (std::size_t pi = 0; pi < s.coupling.pairs.size(); ++pi) {
    const auto& p = s.coupling.pairs[pi];
    std::string pp = "coupling.pairs[" + std::to_string(pi) + "]";
    if (p.to_group == p.from_group)
      throw ValidationError(pp + ": self-coupling is not allowed (kappa[n][n] is zero)");
    if (p.to_group < 0 || p.to_group >= n_groups || p.from_group < 0 || p.from_group >= n_groups)
      throw ValidationError(pp + ": group index out of range");
    for (auto& [f, v] : p.kappa.samples())
      if (v < 0.0) throw ValidationError(pp + ".crosstalk: samples must be >= 0");
  }
  if (n_groups > 1) {
    for (int a = 0; a < n_groups; ++a)
      for (int b = 0; b < n_groups; ++b) {
        if (a == b) continue;
        if (!s.coupling.find(a, b))
          s.warnings.push_back("no crosstalk profile for pair (" + std::to_string(a) + "," +
                               std::to_string(b) + "); treated as zero coupling");
      }
  }

  if (s.solver.img_terms) {
    for (int g = 0; g < n_groups; ++g)
      if (!s.groups[g].a_eff)
        throw ValidationError("mode_groups[" + std::to_string(g) +
                              "].effective_area_um2: required when solver.img_terms is on");
    for (std::size_t pi = 0; pi < s.coupling.pairs.size(); ++pi) {
      const auto& p = s.coupling.pairs[pi];
      std::string pp = "coupling.pairs[" + std::to_string(pi) + "]";
      if (!p.a_eff_cross)
        throw ValidationError(pp + ".cross_effective_area_um2: required when img_terms is on");
      if (!p.fwm_overlap)
        throw ValidationError(pp + ".fwm_overlap: required when img_terms is on");
    }
  }

  // Derived per-channel coefficient tables (depletion folded into alpha).
  for (int g = 0; g < n_groups; ++g) {
    for (int c = 0; c < n_ch; ++c) {
      double f = s.grid.frequency(c);
      double a = s.groups[g].attenuation.at(f);
      if (s.coupling.include_depletion) {
        for (int m = 0; m < n_groups; ++m) {
          if (m == g) continue;
          if (const SpectralProfile* k = s.coupling.kappa_profile(m, g)) a += k->at(f);
        }
      }
      s.alpha[g][c] = a;
      s.rayleigh[g][c] = s.groups[g].rayleigh.at(f);
    }
  }

  // Launch powers. Totals split evenly over allocated slots.
  for (int g = 0; g < n_groups; ++g) {
    std::string lp = "launch";
    if (s.launch.per_channel_dbm[g]) {
      const auto& row = *s.launch.per_channel_dbm[g];
      if (static_cast<int>(row.size()) != n_ch)
        throw ValidationError(lp + ".per_channel_dBm[" + std::to_string(g) +
                              "]: needs one value per channel");
      for (int c = 0; c < n_ch; ++c) {
        double w = units::dbm_to_watt(row[c]);
        if (!s.grid.allocated(g, c)) {
          if (w > 0.0)
            throw ValidationError(lp + ".per_channel_dBm[" + std::to_string(g) + "][" +
                                  std::to_string(c) +
                                  "]: slot is deallocated (quantum/guard/notch) and must carry no "
                                  "power; use null or -inf");
          w = 0.0;
        }
        s.launch.p_tx[g][c] = w;
      }
    } else if (s.launch.total_dbm[g]) {
      double total = units::dbm_to_watt(*s.launch.total_dbm[g]);
      int active = 0;
      for (int c = 0; c < n_ch; ++c) active += s.grid.allocated(g, c) ? 1 : 0;
      if (active == 0)
        throw ValidationError(lp + ".total_dBm[" + std::to_string(g) +
                              "]: group has no allocated channels to carry power");
      double per = total / active;
      for (int c = 0; c < n_ch; ++c) s.launch.p_tx[g][c] = s.grid.allocated(g, c) ? per : 0.0;
    }
    for (int c = 0; c < n_ch; ++c) {
      if (s.launch.p_tx[g][c] < 0.0)
        throw ValidationError("launch: negative power at group " + std::to_string(g) +
                              " channel " + std::to_string(c));
      s.group_power[g] += s.launch.p_tx[g][c];
    }
  }
  if (s.launch.p_tx[s.grid.quantum_group][s.grid.quantum_channel] != 0.0)
    throw ValidationError("launch: quantum slot must carry zero classical power");

  // Classical load must be unidirectional; the counter solve assumes it.
  std::optional<Direction> classical_dir;
  for (int g = 0; g < n_groups; ++g) {
    if (s.group_power[g] <= 0.0) continue;
    if (!classical_dir)
      classical_dir = s.launch.direction[g];
    else if (*classical_dir != s.launch.direction[g])
      throw ValidationError("unsupported: bidirectional classical load");
  }

  if (!s.grid.notch) {
    for (int g = 0; g < n_groups; ++g) {
      if (g == s.grid.quantum_group) continue;
      if (s.grid.allocated(g, s.grid.quantum_channel))
        s.warnings.push_back("quantum channel frequency is allocated in mode group " +
                             std::to_string(g) + " (no notch); in-band crosstalk will dominate");
    }
  }

  if (s.receiver) {
    if (s.receiver->signal_rate < 0.0)
      throw ValidationError("receiver.signal_rate_per_s: must be >= 0");
    if (s.receiver->detector_bandwidth < 0.0)
      throw ValidationError("receiver.detector_bandwidth_GHz: must be >= 0");
    if (s.receiver->detector_efficiency <= 0.0 || s.receiver->detector_efficiency > 1.0)
      throw ValidationError("receiver.detector_efficiency: must be in (0, 1]");
    if (s.receiver->lo_shot_variance < 0.0)
      throw ValidationError("receiver.lo_shot_variance_W: must be >= 0");
  }

  s.validated = true;
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["scheme"] = s.scheme == Scheme::co ? "co" : "counter";

  json grid;
  grid["f_min_Hz"] = s.grid.f_min;
  grid["spacing_Hz"] = s.grid.spacing;
  grid["channels"] = s.grid.count;
  grid["quantum"] = json{{"group", s.grid.quantum_group}, {"channel", s.grid.quantum_channel}};
  grid["guard_channels"] = s.grid.guard_channels;
  grid["notch"] = s.grid.notch;
  doc["grid"] = grid;

  json groups = json::array();
  for (const ModeGroupSpec& mg : s.groups) {
    json g;
    g["name"] = mg.name;
    g["degenerate_modes"] = mg.degenerate_modes;
    g["gamma_per_W_m"] = mg.gamma;
    g["raman_fraction"] = mg.raman_fraction;
    g["beta2_s2_per_m"] = mg.beta2;
    g["attenuation"] = profile_to_json(mg.attenuation, "samples_per_m");
    json raman;
    if (mg.raman_gain.table) {
      json arr = json::array();
      for (auto& [f, v] : mg.raman_gain.table->samples()) arr.push_back(json::array({f, v}));
      raman["samples_per_W_m"] = arr;
    } else {
      raman["slope_per_W_m_Hz"] = mg.raman_gain.slope;
      if (std::isfinite(mg.raman_gain.peak)) raman["peak_per_W_m"] = mg.raman_gain.peak;
    }
    g["raman_gain"] = raman;
    g["rayleigh"] = profile_to_json(mg.rayleigh, "samples_per_m");
    g["kurtosis"] = mg.kurtosis;
    if (mg.a_eff) g["effective_area_m2"] = *mg.a_eff;
    groups.push_back(g);
  }
  doc["mode_groups"] = groups;

  if (!s.coupling.pairs.empty() || s.coupling.include_depletion) {
    json coupling;
    coupling["include_depletion"] = s.coupling.include_depletion;
    json pairs = json::array();
    for (const auto& p : s.coupling.pairs) {
      json pj;
      pj["to_group"] = p.to_group;
      pj["from_group"] = p.from_group;
      pj["crosstalk"] = profile_to_json(p.kappa, "samples_per_m");
      if (p.a_eff_cross) pj["cross_effective_area_m2"] = *p.a_eff_cross;
      if (p.fwm_overlap) pj["fwm_overlap"] = *p.fwm_overlap;
      pairs.push_back(pj);
    }
    coupling["pairs"] = pairs;
    doc["coupling"] = coupling;
  }

  json launch;
  launch["temperature_K"] = s.launch.temperature;
  json totals = json::array();
  bool any_total = false;
  for (auto& t : s.launch.total_dbm) {
    if (t) {
      totals.push_back(*t);
      any_total = true;
    } else {
      totals.push_back(nullptr);
    }
  }
  if (any_total) launch["total_dBm"] = totals;
  json per_ch = json::array();
  bool any_per = false;
  for (auto& row : s.launch.per_channel_dbm) {
    if (row) {
      per_ch.push_back(*row);
      any_per = true;
    } else {
      per_ch.push_back(nullptr);
    }
  }
  if (any_per) launch["per_channel_dBm"] = per_ch;
  json dirs = json::array();
  for (Direction d : s.launch.direction)
    dirs.push_back(d == Direction::forward ? "forward" : "backward");
  launch["direction"] = dirs;
  doc["launch"] = launch;

  json solver;
  solver["steps_per_span"] = s.solver.steps_per_span;
  solver["span_m"] = s.solver.span_length;
  solver["fwm"] = s.solver.fwm_mode == FwmEfficiencyMode::averaged ? "averaged" : "exact";
  solver["track"] = s.solver.track_mode == TrackMode::target_channel ? "target" : "full";
  solver["tilt"] = s.solver.tilt;
  solver["n_R"] = s.solver.n_r;
  solver["img_terms"] = s.solver.img_terms;
  solver["backward_fwm"] = s.solver.backward_fwm == FwmEfficiencyMode::averaged ? "averaged" : "exact";
  doc["solver"] = solver;

  if (s.receiver) {
    json rec;
    rec["signal_rate_per_s"] = s.receiver->signal_rate;
    rec["detector_bandwidth_Hz"] = s.receiver->detector_bandwidth;
    rec["detector_efficiency"] = s.receiver->detector_efficiency;
    rec["lo_shot_variance_W"] = s.receiver->lo_shot_variance;
    doc["receiver"] = rec;
  }

  return doc.dump(2) + "\n";
}

std::uint64_t settings_hash(const Scenario& s) {
  std::string text = serialize_scenario(s);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace coexsim
