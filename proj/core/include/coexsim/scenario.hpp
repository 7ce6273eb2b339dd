#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coexsim/profiles.hpp"

namespace coexsim {

// Raised on malformed scenario documents; message carries the offending key
// path and, for syntax errors, the line number.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ChannelGrid {
  double f_min = 0.0;    // Hz, center frequency of channel 0
  double spacing = 0.0;  // Hz
  int count = 0;
  int quantum_group = 0;
  int quantum_channel = 0;
  int guard_channels = 0;
  bool notch = true;  // quantum frequency left unallocated in classical groups
  // allocation[group][channel]: true when the slot carries classical power
  std::vector<std::vector<std::uint8_t>> allocation;

  double frequency(int channel) const { return f_min + spacing * channel; }
  bool allocated(int group, int channel) const {
    return allocation[group][channel] != 0;
  }
  bool operator==(const ChannelGrid&) const = default;
};

enum class Direction { forward, backward };

struct ModeGroupSpec {
  std::string name;
  int degenerate_modes = 1;     // D
  double gamma = 0.0;           // 1/(W m)
  double raman_fraction = 0.0;  // F_R
  double beta2 = 0.0;           // s^2/m, signed
  SpectralProfile attenuation;  // 1/m vs Hz
  RamanGainModel raman_gain;
  SpectralProfile rayleigh;          // 1/m vs Hz
  std::vector<double> kurtosis;      // per channel (excess kurtosis)
  std::optional<double> a_eff;       // m^2, needed only for inter-group terms
  bool operator==(const ModeGroupSpec&) const = default;
};

struct CouplingSpec {
  struct Pair {
    int to_group = 0;
    int from_group = 0;
    SpectralProfile kappa;                   // 1/m vs Hz
    std::optional<double> a_eff_cross;       // m^2
    std::optional<double> fwm_overlap;       // r_nm
    bool operator==(const Pair&) const = default;
  };
  std::vector<Pair> pairs;
  bool include_depletion = false;

  const SpectralProfile* kappa_profile(int to_group, int from_group) const;
  const Pair* find(int to_group, int from_group) const;
  bool operator==(const CouplingSpec&) const = default;
};

struct LaunchPlan {
  // p_tx[group][channel] in W; zero on deallocated slots and the quantum slot.
  std::vector<std::vector<double>> p_tx;
  std::vector<Direction> direction;  // per group
  double temperature = 300.0;        // K
  // Ingested form, kept for serialization round-trips.
  std::vector<std::optional<double>> total_dbm;
  std::vector<std::optional<std::vector<double>>> per_channel_dbm;
  bool operator==(const LaunchPlan&) const = default;
};

enum class FwmEfficiencyMode { averaged, exact };
enum class TrackMode { target_channel, full_grid };
enum class Scheme { co, counter };

struct SolverSettings {
  int steps_per_span = 100;
  double span_length = 100e3;  // m
  FwmEfficiencyMode fwm_mode = FwmEfficiencyMode::averaged;
  TrackMode track_mode = TrackMode::target_channel;
  bool tilt = true;  // apply SRS-induced tilt to signal profiles
  int n_r = 3;       // tilt fit parameter, 3 for C-band
  bool img_terms = false;
  FwmEfficiencyMode backward_fwm = FwmEfficiencyMode::averaged;
  bool operator==(const SolverSettings&) const = default;
};

struct ReceiverSpec {
  double signal_rate = 0.0;          // received quantum signal rate, 1/s
  double detector_bandwidth = 0.0;   // Hz, defaults to B_s when 0
  double detector_efficiency = 1.0;  // fraction of interference photons detected
  double lo_shot_variance = 0.0;     // W, CV-QKD shot noise variance
  bool operator==(const ReceiverSpec&) const = default;
};

struct Scenario {
  std::string name;
  Scheme scheme = Scheme::co;
  ChannelGrid grid;
  std::vector<ModeGroupSpec> groups;
  CouplingSpec coupling;
  LaunchPlan launch;
  SolverSettings solver;
  std::optional<ReceiverSpec> receiver;

  // Populated by validate():
  bool validated = false;
  std::vector<double> r;                       // nonlinear scaling per group
  std::vector<std::vector<double>> alpha;      // 1/m at grid frequencies (incl. depletion)
  std::vector<std::vector<double>> rayleigh;   // 1/m at grid frequencies
  std::vector<double> group_power;             // total classical launch per group, W
  std::vector<std::string> warnings;

  int group_count() const { return static_cast<int>(groups.size()); }
  double frequency(int channel) const { return grid.frequency(channel); }
  bool operator==(const Scenario&) const;
};

// Allocation mask construction: guard channels are removed on each side of the
// quantum slot in every group (clipped at band edges); the quantum slot itself
// never carries classical power in its own group, and is notched out of the
// other groups unless notch is false. Groups without launch power stay empty.
ChannelGrid build_grid(double f_min, double spacing, int count, int guard_channels,
                       int quantum_group, int quantum_channel, int group_count,
                       const std::vector<bool>& group_has_power, bool notch = true);

// Parses a scenario document (JSON key tree, engineering units). Profile CSV
// references are resolved relative to base_dir.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario parse_scenario_file(const std::string& path);

// Checks every invariant, fills derived quantities, and freezes the scenario.
// Throws ValidationError with the offending path on the first violation.
Scenario validate(Scenario spec);

// Canonical document emission; parse(serialize(s)) == s field-by-field.
std::string serialize_scenario(const Scenario& spec);

// Two-column CSV: header line, then frequency_THz,value rows.
std::vector<std::pair<double, double>> load_profile_csv(const std::string& path);

std::uint64_t settings_hash(const Scenario& spec);

}  // namespace coexsim
