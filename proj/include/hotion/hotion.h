/*
 * C interface to the hot-ion CROT gate simulator.
 *
 * Every function returns an hti_status. On failure a description of the
 * error is available from hti_last_error() on the calling thread until the
 * next call into the library from that thread. Strings returned through
 * `char**` out-parameters are owned by the caller and must be released with
 * hti_string_free().
 */
#ifndef HOTION_HOTION_H
#define HOTION_HOTION_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HOTION_BUILDING_LIBRARY)
#    define HTI_API __declspec(dllexport)
#  else
#    define HTI_API __declspec(dllimport)
#  endif
#else
#  define HTI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as CLI exit codes. */
typedef enum hti_status {
  HTI_OK = 0,
  HTI_ERR_ARGUMENT = 1,   /* null handle, bad enum value, I/O failure */
  HTI_ERR_CONFIG = 2,     /* unparsable or inconsistent configuration */
  HTI_ERR_DOMAIN = 3,     /* a simulation precondition was violated */
  HTI_ERR_INTERNAL = 4
} hti_status;

typedef enum hti_format { HTI_FORMAT_JSON = 0, HTI_FORMAT_CSV = 1 } hti_format;

typedef struct hti_experiment hti_experiment;

HTI_API const char* hti_version(void);
HTI_API const char* hti_last_error(void);
HTI_API void hti_string_free(char* s);

/* Experiment handles wrap one parsed configuration file. */
HTI_API hti_status hti_experiment_load_file(const char* path, hti_experiment** out);
HTI_API hti_status hti_experiment_load_json(const char* json_text, hti_experiment** out);
HTI_API void hti_experiment_free(hti_experiment* exp);
/* Normalized configuration (all defaults filled in) as JSON text. */
HTI_API hti_status hti_experiment_to_json(const hti_experiment* exp, char** out_json);

/* Writes the gate report to *out_text; fidelities may be NULL. */
HTI_API hti_status hti_run_truth_table(const hti_experiment* exp, hti_format format, uint64_t seed,
                                       char** out_text, double* qubit_fidelity,
                                       double* phonon_restoration_fidelity);
/* max_workers == 0 selects the hardware concurrency. */
HTI_API hti_status hti_run_sweep(const hti_experiment* exp, hti_format format, uint64_t seed,
                                 int include_runtime, unsigned max_workers, char** out_text);
HTI_API hti_status hti_run_stirap_trace(const hti_experiment* exp, hti_format format, char** out_text);

/* Physical-parameter formulas (rad/s and s). */
HTI_API hti_status hti_chi(double eta, double omega_rad_per_s, int n_ions, double delta_rad_per_s,
                           double* out_chi);
HTI_API hti_status hti_tau(double eta, double omega_rad_per_s, int n_ions, double delta_rad_per_s,
                           double* out_tau);

/* Ideal-mode CROT truth table for a phonon spec string ("fock:n",
 * "coherent:re,im", "thermal:nbar", "random:seed"). `re` and `im` receive the
 * 4x4 table in row-major order, rows/columns ordered |c t> = 00,01,10,11. */
HTI_API hti_status hti_ideal_truth_table(const char* phonon_spec, int n_max, double max_discarded,
                                         double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif /* HOTION_HOTION_H */
