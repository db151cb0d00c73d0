/*
   Copyright 2026 The mmtail developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

/*
 * mmtail C API.
 *
 * Tail analysis of the stationary solution R of the random linear recursion
 * S_n = A_n + B_n S_{n-1} driven by a finite-state Markov-modulated
 * coefficient process: spectral tail index, structural checks, Monte Carlo
 * simulation and tail-constant estimation.
 *
 * Conventions:
 *  - every function returns an mmt_status; MMT_OK is 0
 *  - on failure, mmt_last_error() returns a thread-local message that stays
 *    valid until the next failing call on the same thread
 *  - objects returned through mmt_model** / mmt_batch** are owned by the
 *    caller and released with the matching *_free
 *  - strings returned through char** are owned by the caller and released
 *    with mmt_string_free; structured results are UTF-8 JSON documents
 */

#ifndef MMTAIL_H
#define MMTAIL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mmt_model mmt_model;
typedef struct mmt_batch mmt_batch;

typedef enum mmt_status {
    MMT_OK = 0,
    MMT_ERR_ARGUMENT = 1,      /* null pointer / bad parameter */
    MMT_ERR_PARSE = 2,         /* malformed model JSON or sample CSV */
    MMT_ERR_INVALID_MODEL = 3, /* validation found violations */
    MMT_ERR_ASSUMPTION = 4,    /* no kappa root, nonpositive drift, ... */
    MMT_ERR_RUNTIME = 5        /* non-convergence, suspected divergence, ... */
} mmt_status;

const char* mmt_version(void);
const char* mmt_last_error(void);
void mmt_string_free(char* s);

/* ---- model ---------------------------------------------------------- */

/* Parse the model-file JSON document (see README for the schema). The
 * model is parsed but not yet validated. */
mmt_status mmt_model_from_json(const char* json_text, mmt_model** out);
void mmt_model_free(mmt_model* m);

size_t mmt_model_state_count(const mmt_model* m);

/* Validation report as JSON {"violations": [...]}; MMT_OK when empty,
 * MMT_ERR_INVALID_MODEL otherwise (report_json is filled either way
 * unless NULL is passed). */
mmt_status mmt_model_validate(const mmt_model* m, char** report_json);

/* Stationary distribution into pi[0..len), len must equal state count. */
mmt_status mmt_model_stationary(const mmt_model* m, double* pi, size_t len);

/* ---- spectral analysis ---------------------------------------------- */

typedef struct mmt_analyze_opts {
    double spectral_tol; /* <= 0: default 1e-12 */
    double kappa_tol;    /* <= 0: default 1e-10 */
    double beta_max;     /* <= 0: default 64 */
    int grid_points;     /* <= 0: default 33 */
} mmt_analyze_opts;

/* Lambda grid, kappa, eigenfunction h, tilted kernel, pi_h, drift; JSON. */
mmt_status mmt_analyze(const mmt_model* m, const mmt_analyze_opts* opts, char** json_out);

/* ---- structural checks ----------------------------------------------- */

/* Period and cyclic classes, Condition G with witness partition,
 * degeneracy with Gamma, arithmetic/lattice verdict; JSON. tol <= 0 means
 * the 1e-9 default. */
mmt_status mmt_check(const mmt_model* m, double tol, char** json_out);

/* ---- simulation ------------------------------------------------------ */

typedef struct mmt_sim_opts {
    uint64_t seed;
    long long n_per_state;
    double eps_trunc; /* <= 0: default 1e-12 */
    int min_terms;    /* <= 0: default 64 */
    int max_terms;    /* <= 0: default 10000 */
    int workers;      /* <= 0: default 1 */
} mmt_sim_opts;

/* Backward-series Monte Carlo batch; bit-identical for fixed (seed, n)
 * regardless of workers. */
mmt_status mmt_simulate(const mmt_model* m, const mmt_sim_opts* opts, mmt_batch** out);
void mmt_batch_free(mmt_batch* b);

size_t mmt_batch_states(const mmt_batch* b);
size_t mmt_batch_rows_per_state(const mmt_batch* b);
mmt_status mmt_batch_record(const mmt_batch* b, size_t state, size_t index, double* r,
                            double* xi0, double* rho0, int* terms);

/* CSV round-trip of the sample table (columns state,index,R,xi0,rho0,terms). */
mmt_status mmt_batch_to_csv_file(const mmt_batch* b, const char* path);
mmt_status mmt_batch_from_csv_file(const char* path, mmt_batch** out);

/* ---- tail estimation -------------------------------------------------- */

typedef struct mmt_tails_opts {
    double kappa;       /* <= 0: solve spectrally ("auto") */
    int hill_k;         /* <= 0: n^(2/3) capped at 10^4 */
    const double* t_grid; /* NULL: automatic plateau window */
    size_t t_grid_len;
    int grid_points;    /* <= 0: default 12 */
    long long sym_paths; /* < 0: default 100000; 0 disables the check */
    uint64_t sym_seed;
    const double* sym_t_grid; /* NULL: {10, 50, 100} */
    size_t sym_t_grid_len;
} mmt_tails_opts;

/* Hill estimate, t^kappa survival curves with bands, plateau constants,
 * formula constants, per-state medians and the symmetrization table; JSON. */
mmt_status mmt_tails(const mmt_model* m, const mmt_batch* b, const mmt_tails_opts* opts,
                     char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MMTAIL_H */
