#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paraswap/device_model.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/hamiltonian.hpp"
#include "paraswap/tomography.hpp"

namespace paraswap {

/// Z-crosstalk compensation over channel order (Q1, Q2, coupler). The stored
/// matrix is already the inverse of the measured response.
struct CrosstalkMatrix {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  bool diagonally_dominant() const;
  /// Throws InvalidArgument when singular; warns when not diagonally dominant.
  void validate() const;
};

/// M̃_z · v for requested biases v in mV.
Eigen::Vector3d apply_crosstalk_correction(const Eigen::Vector3d& requested,
                                           const CrosstalkMatrix& matrix);

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int points = 0;

  std::vector<double> values() const;
};

struct GateSettings {
  double time = 204e-9;
  double ramp = kDefaultRamp;
  double phase = 0.0;
};

struct J12SweepSettings {
  SweepRange coupler_ghz{5.40, 6.20, 161};
};

struct ZzSweepSettings {
  SweepRange coupler_ghz{5.40, 6.20, 161};
  int levels = 3;
  bool ramsey = false;
};

struct ChevronSettings {
  int point = 0;
  double amplitude = 0.0;   // Φ₀; 0 selects the amplitude of a gate-time swap
  double center_mhz = 0.0;  // 0 centers on the effective drive frequency
  double span_mhz = 4.0;
  int freq_points = 81;
  double duration_ns = 600.0;
  int time_points = 301;
};

struct SwapSpecSettings {
  SweepRange coupler_ghz{5.60, 6.20, 25};
  double duration_ns = 400.0;
  int time_points = 801;
  int levels = 3;
  double ripple_threshold = 0.05;
};

struct DecayFitSettings {
  int point = 0;
  std::vector<int> n_list{1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21};
  bool twirl = false;  // repeat the Pauli-twirled channel instead of the raw gate
};

struct QptSettingsBlock {
  int point = 0;
};

/// Everything a run needs, resolved from the configuration file and flags.
struct RunConfig {
  DeviceParams device;
  CrosstalkMatrix crosstalk;
  ConfusionMatrix confusion;
  double prep_depolarizing = 0.0;
  std::vector<OperatingPoint> points;
  GateSettings gate;
  ModelSpec model = ModelSpec::two_level();
  int zz_levels = 3;

  J12SweepSettings j12_sweep;
  ZzSweepSettings zz_sweep;
  ChevronSettings chevron;
  SwapSpecSettings swap_spec;
  QptSettingsBlock qpt;
  DecayFitSettings decay_fit;

  std::string experiment;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> shots;  // empty: exact
  int threads = 1;

  CalibrationOptions calibration_options() const;
  BudgetOptions budget_options() const;
  QptSettings qpt_settings() const;
  /// The resolved configuration in file units, for run metadata.
  nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();

/// Every problem found in a parsed configuration document; empty means valid.
/// Missing required keys are reported by their dotted path.
std::vector<std::string> validate_config(const nlohmann::json& doc);

/// Validates and converts. Throws ConfigError carrying the full problem list.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace paraswap
