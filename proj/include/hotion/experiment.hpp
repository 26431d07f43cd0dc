#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hotion/gate.hpp"

namespace hotion {

enum class OutputFormat { Json, Csv };
OutputFormat parse_format(std::string_view name);

/// Schedule section of an experiment file. Pulse centres and widths default to
/// the counter-intuitive layout of StirapSchedule::counter_intuitive.
struct ScheduleConfig {
  PulseShape shape = PulseShape::Sin2;
  double duration_s = 0.0;
  std::optional<double> dt_s;
  std::optional<std::int64_t> steps;
  double pump_peak_rad_per_s = 0.0;
  double stokes_peak_rad_per_s = 0.0;
  std::optional<double> pump_center_s;
  std::optional<double> pump_width_s;
  std::optional<double> stokes_center_s;
  std::optional<double> stokes_width_s;

  StirapSchedule build() const;
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct TraceConfig {
  int n = 0;
  Direction direction = Direction::Up;
  std::int64_t stride = 1;
};

/// Parsed experiment file. Every physical quantity carries its unit in the
/// key name (e.g. delta_rad_per_s, duration_s).
struct ExperimentConfig {
  GateMode mode = GateMode::Ideal;
  int control = 0;
  int target = 1;
  int register_ions = 2;
  double epsilon = 0.0;
  bool phase_compensation = false;
  PhysicalParams params;
  std::optional<ScheduleConfig> schedule;

  std::string phonon_state = "fock:0";
  int n_max = kDefaultNMax;
  double max_discarded_weight = kLeakTol;

  std::vector<SweepAxis> sweep;
  TraceConfig trace;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;

  GateConfig gate_config() const;
  PhononSpec phonon(std::uint64_t seed) const;

  /// Sets one sweepable quantity by its config key name.
  void set(std::string_view name, double value);
  static const std::vector<std::string>& sweepable();
};

struct TruthTableOutput {
  std::string text;
  GateReport report;
};

TruthTableOutput run_truth_table(const ExperimentConfig& config, OutputFormat format, std::uint64_t seed);

/// One row per grid point in lexicographic order (first axis slowest).
/// `max_workers == 0` uses the hardware concurrency.
std::string run_sweep(const ExperimentConfig& config, OutputFormat format, std::uint64_t seed,
                      bool include_runtime, unsigned max_workers);

std::string run_stirap_trace(const ExperimentConfig& config, OutputFormat format);

nlohmann::json report_to_json(const GateReport& report);

/// "%.17g" formatting used by every CSV writer.
std::string format_double(double x);

}  // namespace hotion
