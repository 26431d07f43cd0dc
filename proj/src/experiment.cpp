#include "hotion/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace hotion {

using nlohmann::json;

OutputFormat parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw ConfigError("output format must be json or csv, got '" + std::string(name) + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------

StirapSchedule ScheduleConfig::build() const {
  if (!(duration_s > 0.0)) throw ConfigError("schedule.duration_s must be > 0");
  std::int64_t n_steps = 0;
  if (steps) {
    n_steps = *steps;
  } else if (dt_s) {
    if (!(*dt_s > 0.0)) throw ConfigError("schedule.dt_s must be > 0");
    n_steps = std::llround(duration_s / *dt_s);
    if (n_steps < 1 || std::abs(static_cast<double>(n_steps) * *dt_s - duration_s) > 1e-9 * duration_s)
      throw ConfigError("schedule.duration_s must be an integer multiple of schedule.dt_s");
  } else {
    throw ConfigError("schedule needs dt_s or steps");
  }
  if (n_steps < 1) throw ConfigError("schedule.steps must be >= 1");
  StirapSchedule s = StirapSchedule::counter_intuitive(duration_s, n_steps, pump_peak_rad_per_s,
                                                       stokes_peak_rad_per_s, shape);
  if (pump_center_s) s.pump.center = *pump_center_s;
  if (pump_width_s) s.pump.width = *pump_width_s;
  if (stokes_center_s) s.stokes.center = *stokes_center_s;
  if (stokes_width_s) s.stokes.width = *stokes_width_s;
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
T require(const json& obj, const std::string& section, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + section + "." + key + "'");
  return obj.at(key).get<T>();
}

GateMode parse_mode(const std::string& s) {
  if (s == "ideal") return GateMode::Ideal;
  if (s == "stirap") return GateMode::Stirap;
  throw ConfigError("gate.mode must be ideal or stirap, got '" + s + "'");
}

const char* mode_name(GateMode m) { return m == GateMode::Ideal ? "ideal" : "stirap"; }

PulseShape parse_shape(const std::string& s) {
  if (s == "sin2") return PulseShape::Sin2;
  if (s == "gaussian") return PulseShape::Gaussian;
  throw ConfigError("schedule.shape must be sin2 or gaussian, got '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  throw ConfigError("trace.direction must be up or down, got '" + s + "'");
}

std::vector<double> axis_values(const json& a, const std::string& name) {
  if (a.contains("values")) {
    auto v = a.at("values").get<std::vector<double>>();
    if (v.empty()) throw ConfigError("sweep axis '" + name + "' has no values");
    return v;
  }
  const double start = require<double>(a, "sweep.axes", "start");
  const double stop = require<double>(a, "sweep.axes", "stop");
  const int steps = require<int>(a, "sweep.axes", "steps");
  if (steps < 1) throw ConfigError("sweep axis '" + name + "' needs steps >= 1");
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i)
    v[i] = steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / (steps - 1);
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j, "<root>", {"gate", "params", "schedule", "phonon", "sweep", "trace"});
    if (j.contains("gate")) {
      const json& g = j.at("gate");
      reject_unknown(g, "gate", {"mode", "control", "target", "register_ions", "epsilon", "phase_compensation"});
      if (g.contains("mode")) c.mode = parse_mode(g.at("mode").get<std::string>());
      read(g, "control", c.control);
      read(g, "target", c.target);
      read(g, "register_ions", c.register_ions);
      read(g, "epsilon", c.epsilon);
      read(g, "phase_compensation", c.phase_compensation);
    }
    if (j.contains("params")) {
      const json& p = j.at("params");
      reject_unknown(p, "params", {"eta", "omega_rad_per_s", "n_ions", "delta_rad_per_s", "delta_stirap_rad_per_s"});
      read(p, "eta", c.params.eta);
      read(p, "omega_rad_per_s", c.params.omega_rad_per_s);
      read(p, "n_ions", c.params.n_ions);
      read(p, "delta_rad_per_s", c.params.delta_rad_per_s);
      read(p, "delta_stirap_rad_per_s", c.params.delta_stirap_rad_per_s);
    }
    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      reject_unknown(s, "schedule",
                     {"shape", "duration_s", "dt_s", "steps", "pump_peak_rad_per_s", "stokes_peak_rad_per_s",
                      "pump_center_s", "pump_width_s", "stokes_center_s", "stokes_width_s"});
      ScheduleConfig sc;
      if (s.contains("shape")) sc.shape = parse_shape(s.at("shape").get<std::string>());
      sc.duration_s = require<double>(s, "schedule", "duration_s");
      read(s, "dt_s", sc.dt_s);
      read(s, "steps", sc.steps);
      sc.pump_peak_rad_per_s = require<double>(s, "schedule", "pump_peak_rad_per_s");
      sc.stokes_peak_rad_per_s = require<double>(s, "schedule", "stokes_peak_rad_per_s");
      read(s, "pump_center_s", sc.pump_center_s);
      read(s, "pump_width_s", sc.pump_width_s);
      read(s, "stokes_center_s", sc.stokes_center_s);
      read(s, "stokes_width_s", sc.stokes_width_s);
      c.schedule = sc;
    }
    if (j.contains("phonon")) {
      const json& p = j.at("phonon");
      reject_unknown(p, "phonon", {"state", "n_max", "max_discarded_weight"});
      read(p, "state", c.phonon_state);
      read(p, "n_max", c.n_max);
      read(p, "max_discarded_weight", c.max_discarded_weight);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      reject_unknown(s, "sweep", {"axes"});
      for (const json& a : s.value("axes", json::array())) {
        reject_unknown(a, "sweep.axes", {"name", "values", "start", "stop", "steps"});
        SweepAxis axis;
        axis.name = require<std::string>(a, "sweep.axes", "name");
        const auto& names = sweepable();
        if (std::find(names.begin(), names.end(), axis.name) == names.end())
          throw ConfigError("sweep axis '" + axis.name + "' is not a sweepable parameter");
        axis.values = axis_values(a, axis.name);
        c.sweep.push_back(std::move(axis));
      }
    }
    if (j.contains("trace")) {
      const json& t = j.at("trace");
      reject_unknown(t, "trace", {"n", "direction", "stride"});
      read(t, "n", c.trace.n);
      if (t.contains("direction")) c.trace.direction = parse_direction(t.at("direction").get<std::string>());
      read(t, "stride", c.trace.stride);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.n_max < 1) throw ConfigError("phonon.n_max must be >= 1");
  if (!(c.max_discarded_weight >= 0.0)) throw ConfigError("phonon.max_discarded_weight must be >= 0");
  if (c.trace.stride < 1) throw ConfigError("trace.stride must be >= 1");
  if (c.mode == GateMode::Stirap && !c.schedule) throw ConfigError("schedule required in stirap mode");
  return c;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

json ExperimentConfig::to_json() const {
  json j;
  j["gate"] = {{"mode", mode_name(mode)}, {"control", control}, {"target", target},
               {"register_ions", register_ions}, {"epsilon", epsilon}, {"phase_compensation", phase_compensation}};
  j["params"] = {{"eta", params.eta},
                 {"omega_rad_per_s", params.omega_rad_per_s},
                 {"n_ions", params.n_ions},
                 {"delta_rad_per_s", params.delta_rad_per_s},
                 {"delta_stirap_rad_per_s", params.delta_stirap_rad_per_s}};
  if (schedule) {
    const ScheduleConfig& s = *schedule;
    json js = {{"shape", s.shape == PulseShape::Sin2 ? "sin2" : "gaussian"},
               {"duration_s", s.duration_s},
               {"pump_peak_rad_per_s", s.pump_peak_rad_per_s},
               {"stokes_peak_rad_per_s", s.stokes_peak_rad_per_s}};
    if (s.dt_s) js["dt_s"] = *s.dt_s;
    if (s.steps) js["steps"] = *s.steps;
    if (s.pump_center_s) js["pump_center_s"] = *s.pump_center_s;
    if (s.pump_width_s) js["pump_width_s"] = *s.pump_width_s;
    if (s.stokes_center_s) js["stokes_center_s"] = *s.stokes_center_s;
    if (s.stokes_width_s) js["stokes_width_s"] = *s.stokes_width_s;
    j["schedule"] = js;
  }
  j["phonon"] = {{"state", phonon_state}, {"n_max", n_max}, {"max_discarded_weight", max_discarded_weight}};
  json axes = json::array();
  for (const auto& a : sweep) axes.push_back({{"name", a.name}, {"values", a.values}});
  j["sweep"] = {{"axes", axes}};
  j["trace"] = {{"n", trace.n},
                {"direction", trace.direction == Direction::Up ? "up" : "down"},
                {"stride", trace.stride}};
  return j;
}

GateConfig ExperimentConfig::gate_config() const {
  GateConfig g;
  g.control = control;
  g.target = target;
  g.register_ions = register_ions;
  g.mode = mode;
  g.params = params;
  g.epsilon = epsilon;
  g.phase_compensation = phase_compensation;
  if (mode == GateMode::Stirap) {
    if (!schedule) throw ConfigError("schedule required in stirap mode");
    g.schedule = schedule->build();
  }
  try {
    g.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  return g;
}

PhononSpec ExperimentConfig::phonon(std::uint64_t seed) const {
  return parse_phonon_spec(phonon_state, n_max, seed, max_discarded_weight);
}

const std::vector<std::string>& ExperimentConfig::sweepable() {
  static const std::vector<std::string> names = {
      "epsilon",       "eta",        "omega_rad_per_s",     "n_ions",
      "delta_rad_per_s", "delta_stirap_rad_per_s", "duration_s", "dt_s",
      "steps",         "pump_peak_rad_per_s", "stokes_peak_rad_per_s", "n_max"};
  return names;
}

void ExperimentConfig::set(std::string_view name, double value) {
  auto need_schedule = [&]() -> ScheduleConfig& {
    if (!schedule) throw ConfigError("sweep axis '" + std::string(name) + "' needs a schedule section");
    return *schedule;
  };
  auto as_int = [&](double v) {
    if (v != std::floor(v)) throw ConfigError("sweep axis '" + std::string(name) + "' takes integer values");
    return static_cast<std::int64_t>(v);
  };
  if (name == "epsilon") epsilon = value;
  else if (name == "eta") params.eta = value;
  else if (name == "omega_rad_per_s") params.omega_rad_per_s = value;
  else if (name == "n_ions") params.n_ions = static_cast<int>(as_int(value));
  else if (name == "delta_rad_per_s") params.delta_rad_per_s = value;
  else if (name == "delta_stirap_rad_per_s") params.delta_stirap_rad_per_s = value;
  else if (name == "duration_s") need_schedule().duration_s = value;
  else if (name == "dt_s") { need_schedule().dt_s = value; need_schedule().steps.reset(); }
  else if (name == "steps") { need_schedule().steps = as_int(value); need_schedule().dt_s.reset(); }
  else if (name == "pump_peak_rad_per_s") need_schedule().pump_peak_rad_per_s = value;
  else if (name == "stokes_peak_rad_per_s") need_schedule().stokes_peak_rad_per_s = value;
  else if (name == "n_max") n_max = static_cast<int>(as_int(value));
  else throw ConfigError("'" + std::string(name) + "' is not a sweepable parameter");
}

// ---------------------------------------------------------------------------

namespace {

json matrix_json(const Eigen::Matrix4cd& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < 4; ++r) {
    json rr = json::array(), ri = json::array();
    for (int c = 0; c < 4; ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
  return a;
}

}  // namespace

json report_to_json(const GateReport& r) {
  json j = {{"truth_table", matrix_json(r.truth_table)},
            {"table_extracted", r.table_extracted},
            {"table_deviation", r.table_deviation},
            {"qubit_fidelity", r.qubit_fidelity},
            {"qubit_fidelity_raw", r.qubit_fidelity_raw},
            {"qubit_fidelity_compensated", r.qubit_fidelity_compensated},
            {"frame_correction", {{"control_rad", r.frame_correction(0)}, {"target_rad", r.frame_correction(1)}}},
            {"phonon_restoration_fidelity", r.phonon_restoration_fidelity},
            {"leakage", r.leakage},
            {"entanglement_residue", r.entanglement_residue}};
  if (!r.efficiency_up.empty()) {
    j["stirap"] = {{"efficiency_up", vec_json(r.efficiency_up)},
                   {"efficiency_down", vec_json(r.efficiency_down)},
                   {"residual_phase_up_rad", vec_json(r.residual_phase_up)},
                   {"residual_phase_down_rad", vec_json(r.residual_phase_down)},
                   {"adiabaticity_margin", r.adiabaticity_margin}};
  }
  return j;
}

TruthTableOutput run_truth_table(const ExperimentConfig& config, OutputFormat format, std::uint64_t seed) {
  const GateConfig gate = config.gate_config();
  const PhononSpec ph = config.phonon(seed);
  TruthTableOutput out;
  out.report = evaluate_gate(gate, ph.input);

  if (format == OutputFormat::Json) {
    json j = report_to_json(out.report);
    j["phonon_input"] = ph.label;
    j["n_max"] = config.n_max;
    j["discarded_weight"] = ph.discarded_weight;
    j["mode"] = mode_name(config.mode);
    out.text = j.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  const GateReport& r = out.report;
  os << "key,value\n";
  os << "phonon_input," << ph.label << "\n";
  os << "mode," << mode_name(config.mode) << "\n";
  os << "n_max," << config.n_max << "\n";
  os << "discarded_weight," << format_double(ph.discarded_weight) << "\n";
  os << "qubit_fidelity," << format_double(r.qubit_fidelity) << "\n";
  os << "qubit_fidelity_raw," << format_double(r.qubit_fidelity_raw) << "\n";
  os << "qubit_fidelity_compensated," << format_double(r.qubit_fidelity_compensated) << "\n";
  os << "phonon_restoration_fidelity," << format_double(r.phonon_restoration_fidelity) << "\n";
  os << "leakage," << format_double(r.leakage) << "\n";
  os << "entanglement_residue," << format_double(r.entanglement_residue) << "\n";
  os << "table_extracted," << (r.table_extracted ? "true" : "false") << "\n";
  os << "table_deviation," << format_double(r.table_deviation) << "\n";
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) {
      os << "M_" << b << a << "_re," << format_double(r.truth_table(b, a).real()) << "\n";
      os << "M_" << b << a << "_im," << format_double(r.truth_table(b, a).imag()) << "\n";
    }
  os << "frame_correction_control," << format_double(r.frame_correction(0)) << "\n";
  os << "frame_correction_target," << format_double(r.frame_correction(1)) << "\n";
  if (config.mode == GateMode::Stirap) {
    os << "adiabaticity_margin," << format_double(r.adiabaticity_margin) << "\n";
    auto per_n = [&](const char* key, const std::vector<double>& v) {
      for (std::size_t n = 0; n < v.size(); ++n) os << key << "_" << n << "," << format_double(v[n]) << "\n";
    };
    per_n("efficiency_up", r.efficiency_up);
    per_n("efficiency_down", r.efficiency_down);
    per_n("residual_phase_up", r.residual_phase_up);
    per_n("residual_phase_down", r.residual_phase_down);
  }
  out.text = os.str();
  return out;
}

std::string run_sweep(const ExperimentConfig& config, OutputFormat format, std::uint64_t seed,
                      bool include_runtime, unsigned max_workers) {
  if (config.sweep.empty()) throw ConfigError("sweep requires at least one axis in sweep.axes");

  // Lexicographic grid, first axis slowest.
  std::vector<std::vector<double>> grid{{}};
  for (const auto& axis : config.sweep) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : grid)
      for (double v : axis.values) {
        auto row = prefix;
        row.push_back(v);
        next.push_back(std::move(row));
      }
    grid = std::move(next);
  }

  struct Row {
    GateReport report;
    double transfer = std::nan("");
    double runtime = 0.0;
  };
  std::vector<Row> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

  auto run_point = [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig point = config;
    for (std::size_t a = 0; a < config.sweep.size(); ++a) point.set(config.sweep[a].name, grid[i][a]);
    const GateConfig gate = point.gate_config();
    const PhononSpec ph = point.phonon(seed);
    Row& row = rows[i];
    row.report = evaluate_gate(gate, ph.input);
    if (!row.report.efficiency_up.empty())
      row.transfer = *std::min_element(row.report.efficiency_up.begin(), row.report.efficiency_up.end());
    row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  unsigned workers = max_workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : max_workers;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        run_point(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::string> columns;
  for (const auto& a : config.sweep) columns.push_back(a.name);
  for (const char* c : {"gate_fidelity", "phonon_restoration", "leakage", "transfer_efficiency"}) columns.push_back(c);
  if (include_runtime) columns.push_back("runtime_s");

  auto values_of = [&](std::size_t i) {
    std::vector<double> v = grid[i];
    const Row& r = rows[i];
    v.insert(v.end(), {r.report.qubit_fidelity, r.report.phonon_restoration_fidelity, r.report.leakage, r.transfer});
    if (include_runtime) v.push_back(r.runtime);
    return v;
  };

  if (format == OutputFormat::Json) {
    json j = {{"columns", columns}, {"rows", json::array()}};
    for (std::size_t i = 0; i < grid.size(); ++i) j["rows"].push_back(vec_json(values_of(i)));
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = values_of(i);
    for (std::size_t c = 0; c < v.size(); ++c) os << (c ? "," : "") << format_double(v[c]);
    os << "\n";
  }
  return os.str();
}

std::string run_stirap_trace(const ExperimentConfig& config, OutputFormat format) {
  if (config.mode != GateMode::Stirap) throw ConfigError("stirap-trace requires gate.mode = stirap");
  const GateConfig gate = config.gate_config();
  if (config.trace.n < 0 || config.trace.n >= config.n_max + 1)
    throw ConfigError("trace.n must lie in [0, n_max]");
  StirapSchedule s = *gate.schedule;
  if (config.trace.direction == Direction::Down) s = s.reversed();
  const auto points = trace_block(config.trace.n, s, gate.params, config.trace.stride);

  static const char* kColumns[] = {"t_s", "omega_pump_rad_per_s", "omega_stokes_n_rad_per_s",
                                   "pop_1_n", "pop_3_n", "pop_2_n1"};
  if (format == OutputFormat::Json) {
    json cols = json::object();
    std::vector<std::vector<double>> data(6);
    for (const auto& p : points) {
      const double vals[] = {p.t, p.omega_pump, p.omega_stokes, p.pop_excited, p.pop_intermediate, p.pop_shelf};
      for (int c = 0; c < 6; ++c) data[c].push_back(vals[c]);
    }
    for (int c = 0; c < 6; ++c) cols[kColumns[c]] = data[c];
    json j = {{"n", config.trace.n},
              {"direction", config.trace.direction == Direction::Up ? "up" : "down"},
              {"columns", cols}};
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (int c = 0; c < 6; ++c) os << (c ? "," : "") << kColumns[c];
  os << "\n";
  for (const auto& p : points) {
    os << format_double(p.t) << ',' << format_double(p.omega_pump) << ',' << format_double(p.omega_stokes) << ','
       << format_double(p.pop_excited) << ',' << format_double(p.pop_intermediate) << ','
       << format_double(p.pop_shelf) << "\n";
  }
  return os.str();
}

}  // namespace hotion
