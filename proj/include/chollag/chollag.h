/* C interface to the Lagrangian Camassa-Holm solver.
 *
 * Every function returns a chollag_status. On failure the message is kept
 * per thread and can be read with chollag_last_error() until the next call
 * on that thread. Strings handed out by the library are released with
 * chollag_string_free(); handles with their own _free function.
 */
#ifndef CHOLLAG_H
#define CHOLLAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHOLLAG_API __declspec(dllexport)
#else
#define CHOLLAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chollag_status {
  CHOLLAG_OK = 0,
  CHOLLAG_INVALID = 1, /* null pointer, malformed data */
  CHOLLAG_CONFIG = 2,  /* bad configuration, JSON syntax, unknown name */
  CHOLLAG_SOLVER = 3,  /* time stepping failed */
  CHOLLAG_IO = 4,      /* file could not be read or written */
  CHOLLAG_INTERNAL = 5
} chollag_status;

typedef struct chollag_pair chollag_pair;   /* Eulerian (u, mu) */
typedef struct chollag_state chollag_state; /* Lagrangian (zeta, U, H) on a label grid */

CHOLLAG_API const char* chollag_last_error(void);
CHOLLAG_API void chollag_string_free(char* s);
CHOLLAG_API const char* chollag_version(void);

/* Eulerian pairs. `density` has n entries, the last one zero; atoms are
 * given as parallel arrays and may be empty. */
CHOLLAG_API chollag_status chollag_pair_create(const double* x, const double* u, const double* density, size_t n,
                                               const double* atom_x, const double* atom_mass, size_t n_atoms,
                                               chollag_pair** out);
CHOLLAG_API chollag_status chollag_pair_load(const char* path, chollag_pair** out);
CHOLLAG_API chollag_status chollag_pair_save(const chollag_pair* p, const char* path);
CHOLLAG_API chollag_status chollag_pair_size(const chollag_pair* p, size_t* n);
CHOLLAG_API chollag_status chollag_pair_energy(const chollag_pair* p, double* out);
CHOLLAG_API void chollag_pair_free(chollag_pair* p);

/* Lagrangian states. */
CHOLLAG_API chollag_status chollag_state_load(const char* path, chollag_state** out);
CHOLLAG_API chollag_status chollag_state_save(const chollag_state* s, const char* path);
CHOLLAG_API chollag_status chollag_state_size(const chollag_state* s, size_t* n);
CHOLLAG_API chollag_status chollag_state_energy(const chollag_state* s, double* out);
CHOLLAG_API void chollag_state_free(chollag_state* s);

/* L and M. grid_n = 0 keeps the library default (2048 labels). */
CHOLLAG_API chollag_status chollag_to_lagrangian(const chollag_pair* p, size_t grid_n, chollag_state** out);
CHOLLAG_API chollag_status chollag_to_eulerian(const chollag_state* s, chollag_pair** out);

typedef enum chollag_transform_mode {
  CHOLLAG_TO_LAGRANGIAN = 0, /* pair file -> state file */
  CHOLLAG_TO_EULERIAN = 1,   /* state file -> pair file */
  CHOLLAG_ROUNDTRIP = 2      /* pair file -> M(L(pair)) file, with discrepancy report */
} chollag_transform_mode;

/* File-level L / M. The output embeds the hash of the request. The report
 * (may be null) is JSON; for the roundtrip it carries the L-inf discrepancy
 * of u at the input nodes and the energy difference. */
CHOLLAG_API chollag_status chollag_transform(chollag_transform_mode mode, const char* input_path,
                                             const char* output_path, size_t grid_n, char** report_json);

/* Certified bracket lower <= d_D(a, b) <= upper between two pairs, on a
 * common label grid of grid_n nodes (0: 2048). restricted_m > 0 requests
 * the restricted metric and fails with CHOLLAG_CONFIG when either energy
 * exceeds it. */
CHOLLAG_API chollag_status chollag_metric(const chollag_pair* a, const chollag_pair* b, size_t grid_n,
                                          double restricted_m, uint64_t seed, double* lower, double* upper);
/* Same, returning the full bracket as JSON (lower, upper, iterations, witness knots). */
CHOLLAG_API chollag_status chollag_metric_json(const chollag_pair* a, const chollag_pair* b, size_t grid_n,
                                               double restricted_m, uint64_t seed, char** json);

/* Runs a scenario file into out_dir. grid_n = 0, dt <= 0 and t_end < 0 keep
 * the file's values. The summary (config hash, manifest path, drift,
 * residual) comes back as JSON. */
CHOLLAG_API chollag_status chollag_simulate(const char* config_path, const char* out_dir, size_t grid_n, double dt,
                                            double t_end, char** summary_json);

/* Acceptance suites: one of the names listed by chollag_suite_names or
 * "all". The report is a JSON array of {id, suite, passed, detail, seconds}
 * and `lines` gets one formatted line per criterion. */
CHOLLAG_API chollag_status chollag_validate(const char* suite, uint64_t seed, int threads, char** report_json,
                                            char** lines, int* all_passed);
/* Space-separated suite names. */
CHOLLAG_API chollag_status chollag_suite_names(char** names);

#ifdef __cplusplus
}
#endif

#endif
