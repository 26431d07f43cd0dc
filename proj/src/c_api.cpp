#include "hotion/hotion.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "hotion/experiment.hpp"

struct hti_experiment {
  hotion::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

hti_status fail(hti_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
hti_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return HTI_OK;
  } catch (const hotion::Error& e) {
    return fail(e.category() == hotion::ErrorCategory::Config ? HTI_ERR_CONFIG : HTI_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HTI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HTI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HTI_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hotion::OutputFormat to_format(hti_format f) {
  switch (f) {
    case HTI_FORMAT_JSON:
      return hotion::OutputFormat::Json;
    case HTI_FORMAT_CSV:
      return hotion::OutputFormat::Csv;
  }
  throw hotion::ConfigError("unknown output format");
}

hotion::PhysicalParams make_params(double eta, double omega, int n_ions, double delta) {
  hotion::PhysicalParams p;
  p.eta = eta;
  p.omega_rad_per_s = omega;
  p.n_ions = n_ions;
  p.delta_rad_per_s = delta;
  return p;
}

}  // namespace

extern "C" {

const char* hti_version(void) { return "1.0.0"; }

const char* hti_last_error(void) { return g_last_error.c_str(); }

void hti_string_free(char* s) { std::free(s); }

hti_status hti_experiment_load_file(const char* path, hti_experiment** out) {
  if (!path || !out) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new hti_experiment{hotion::ExperimentConfig::load(path)}; });
}

hti_status hti_experiment_load_json(const char* json_text, hti_experiment** out) {
  if (!json_text || !out) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new hti_experiment{hotion::ExperimentConfig::parse(json_text)}; });
}

void hti_experiment_free(hti_experiment* exp) { delete exp; }

hti_status hti_experiment_to_json(const hti_experiment* exp, char** out_json) {
  if (!exp || !out_json) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out_json = nullptr;
  return guarded([&] { *out_json = dup_string(exp->config.to_json().dump(2)); });
}

hti_status hti_run_truth_table(const hti_experiment* exp, hti_format format, uint64_t seed, char** out_text,
                               double* qubit_fidelity, double* phonon_restoration_fidelity) {
  if (!exp || !out_text) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out_text = nullptr;
  return guarded([&] {
    const auto result = hotion::run_truth_table(exp->config, to_format(format), seed);
    if (qubit_fidelity) *qubit_fidelity = result.report.qubit_fidelity;
    if (phonon_restoration_fidelity) *phonon_restoration_fidelity = result.report.phonon_restoration_fidelity;
    *out_text = dup_string(result.text);
  });
}

hti_status hti_run_sweep(const hti_experiment* exp, hti_format format, uint64_t seed, int include_runtime,
                         unsigned max_workers, char** out_text) {
  if (!exp || !out_text) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out_text = nullptr;
  return guarded([&] {
    *out_text = dup_string(
        hotion::run_sweep(exp->config, to_format(format), seed, include_runtime != 0, max_workers));
  });
}

hti_status hti_run_stirap_trace(const hti_experiment* exp, hti_format format, char** out_text) {
  if (!exp || !out_text) return fail(HTI_ERR_ARGUMENT, "null argument");
  *out_text = nullptr;
  return guarded([&] { *out_text = dup_string(hotion::run_stirap_trace(exp->config, to_format(format))); });
}

hti_status hti_chi(double eta, double omega, int n_ions, double delta, double* out_chi) {
  if (!out_chi) return fail(HTI_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out_chi = hotion::chi(make_params(eta, omega, n_ions, delta)); });
}

hti_status hti_tau(double eta, double omega, int n_ions, double delta, double* out_tau) {
  if (!out_tau) return fail(HTI_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out_tau = hotion::tau(make_params(eta, omega, n_ions, delta)); });
}

hti_status hti_ideal_truth_table(const char* phonon_spec, int n_max, double max_discarded, double* re,
                                 double* im) {
  if (!phonon_spec || !re || !im) return fail(HTI_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto spec = hotion::parse_phonon_spec(phonon_spec, n_max, 0, max_discarded);
    const Eigen::Matrix4cd m = hotion::truth_table(hotion::GateConfig{}, spec.input);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        re[r * 4 + c] = m(r, c).real();
        im[r * 4 + c] = m(r, c).imag();
      }
  });
}

}  // extern "C"
