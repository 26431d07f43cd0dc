// Command-line front end. Talks to the simulator exclusively through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "hotion/hotion.h"

namespace {

struct ExperimentDeleter {
  void operator()(hti_experiment* e) const { hti_experiment_free(e); }
};
using ExperimentPtr = std::unique_ptr<hti_experiment, ExperimentDeleter>;

struct TextDeleter {
  void operator()(char* s) const { hti_string_free(s); }
};
using TextPtr = std::unique_ptr<char, TextDeleter>;

struct CommonOptions {
  std::string config;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
};

int report_failure(hti_status status) {
  std::cerr << "hotion: " << hti_last_error() << "\n";
  return static_cast<int>(status);
}

bool write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

unsigned worker_cap() {
  const char* env = std::getenv("HOTION_MAX_WORKERS");
  if (!env || !*env) return 0;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& default_format) {
  opts.format = default_format;
  cmd->add_option("--config", opts.config, "experiment file (JSON)")->required();
  cmd->add_option("--out", opts.out, "output path (default: standard output)");
  cmd->add_option("--format", opts.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "seed for 'random' phonon inputs without an explicit seed")
      ->capture_default_str();
}

hti_format to_format(const std::string& f) { return f == "csv" ? HTI_FORMAT_CSV : HTI_FORMAT_JSON; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hot-ion CROT gate simulator"};
  app.set_version_flag("--version", hti_version());
  app.require_subcommand(1);

  CommonOptions tt_opts, sweep_opts, trace_opts;
  bool timing = false;
  auto* tt = app.add_subcommand("truth-table", "run the gate on every qubit basis input and report the table");
  add_common(tt, tt_opts, "json");
  auto* sweep = app.add_subcommand("sweep", "evaluate the gate over a parameter grid");
  add_common(sweep, sweep_opts, "csv");
  sweep->add_flag("--timing", timing, "append a wall-clock runtime_s column (not reproducible)");
  auto* trace = app.add_subcommand("stirap-trace", "populations of one adiabatic-passage block versus time");
  add_common(trace, trace_opts, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : HTI_ERR_CONFIG;
  }

  const CommonOptions& opts = tt->parsed() ? tt_opts : sweep->parsed() ? sweep_opts : trace_opts;

  hti_experiment* raw = nullptr;
  if (const hti_status s = hti_experiment_load_file(opts.config.c_str(), &raw); s != HTI_OK)
    return report_failure(s);
  const ExperimentPtr exp(raw);

  char* text = nullptr;
  hti_status status = HTI_OK;
  double qubit_fidelity = 0.0, phonon_fidelity = 0.0;
  if (tt->parsed()) {
    status = hti_run_truth_table(exp.get(), to_format(opts.format), opts.seed, &text, &qubit_fidelity,
                                 &phonon_fidelity);
  } else if (sweep->parsed()) {
    status = hti_run_sweep(exp.get(), to_format(opts.format), opts.seed, timing ? 1 : 0, worker_cap(), &text);
  } else {
    status = hti_run_stirap_trace(exp.get(), to_format(opts.format), &text);
  }
  if (status != HTI_OK) return report_failure(status);
  const TextPtr output(text);

  if (!write_output(opts.out, output.get())) {
    std::cerr << "hotion: cannot write '" << opts.out << "'\n";
    return HTI_ERR_ARGUMENT;
  }
  if (tt->parsed()) {
    std::printf("qubit_fidelity %.17g\n", qubit_fidelity);
    std::printf("phonon_restoration_fidelity %.17g\n", phonon_fidelity);
  }
  return 0;
}
