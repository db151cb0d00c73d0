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

#include "mmtail/mmtail.h"

#include "errors.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "montecarlo.hpp"
#include "spectral.hpp"
#include "structure.hpp"
#include "tails.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

using namespace mmtail;

struct mmt_model {
    MmpModel impl;
};

struct mmt_batch {
    SampleBatch impl;
};

namespace {

thread_local std::string g_last_error;

mmt_status fail(mmt_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mmt_status set_out_string(char** out, const std::string& s) {
    if (!out) return MMT_OK;
    *out = dup_string(s);
    return *out ? MMT_OK : fail(MMT_ERR_RUNTIME, "out of memory");
}

// translate C++ exceptions into status codes at the boundary
template <typename F>
mmt_status guarded(F&& f) {
    try {
        return f();
    } catch (const InvalidModel& e) {
        return fail(MMT_ERR_INVALID_MODEL, e.what());
    } catch (const AssumptionError& e) {
        return fail(MMT_ERR_ASSUMPTION, e.what());
    } catch (const NonConvergence& e) {
        return fail(MMT_ERR_RUNTIME, e.what());
    } catch (const ComputationError& e) {
        return fail(MMT_ERR_RUNTIME, e.what());
    } catch (const std::exception& e) {
        return fail(MMT_ERR_RUNTIME, e.what());
    }
}

} // namespace

extern "C" {

const char* mmt_version(void) { return "0.1.0"; }

const char* mmt_last_error(void) { return g_last_error.c_str(); }

void mmt_string_free(char* s) { ::operator delete(s); }

mmt_status mmt_model_from_json(const char* json_text, mmt_model** out) {
    if (!json_text || !out) return fail(MMT_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        try {
            auto* m = new mmt_model{model_from_json(json_text)};
            *out = m;
            return MMT_OK;
        } catch (const InvalidModel& e) {
            return fail(MMT_ERR_PARSE, e.what());
        }
    });
}

void mmt_model_free(mmt_model* m) { delete m; }

size_t mmt_model_state_count(const mmt_model* m) {
    return m ? m->impl.states.size() : 0;
}

mmt_status mmt_model_validate(const mmt_model* m, char** report_json) {
    if (!m) return fail(MMT_ERR_ARGUMENT, "null model");
    return guarded([&] {
        const ValidationReport rep = validate(m->impl);
        const mmt_status st = set_out_string(report_json, validation_report_to_json(rep));
        if (st != MMT_OK) return st;
        if (!rep.empty())
            return fail(MMT_ERR_INVALID_MODEL,
                        std::to_string(rep.size()) + " validation violation(s)");
        return MMT_OK;
    });
}

mmt_status mmt_model_stationary(const mmt_model* m, double* pi, size_t len) {
    if (!m || !pi) return fail(MMT_ERR_ARGUMENT, "null argument");
    if (len != m->impl.states.size()) return fail(MMT_ERR_ARGUMENT, "length mismatch");
    return guarded([&] {
        const Vec v = stationary_distribution(m->impl);
        for (size_t i = 0; i < len; ++i) pi[i] = v[i];
        return MMT_OK;
    });
}

mmt_status mmt_analyze(const mmt_model* m, const mmt_analyze_opts* opts, char** json_out) {
    if (!m || !json_out) return fail(MMT_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        require_valid(m->impl);
        SpectralOptions so;
        int grid_points = 33;
        if (opts) {
            if (opts->spectral_tol > 0) so.spectral_tol = opts->spectral_tol;
            if (opts->kappa_tol > 0) so.kappa_tol = opts->kappa_tol;
            if (opts->beta_max > 0) so.beta_max = opts->beta_max;
            if (opts->grid_points > 0) grid_points = opts->grid_points;
        }
        const SpectralAnalysis sp = analyze_spectral(m->impl, so, grid_points);
        return set_out_string(json_out, spectral_to_json(sp));
    });
}

mmt_status mmt_check(const mmt_model* m, double tol, char** json_out) {
    if (!m || !json_out) return fail(MMT_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        require_valid(m->impl);
        const StructureReport st = analyze_structure(m->impl, tol > 0 ? tol : 1e-9);
        return set_out_string(json_out, structure_to_json(st));
    });
}

mmt_status mmt_simulate(const mmt_model* m, const mmt_sim_opts* opts, mmt_batch** out) {
    if (!m || !opts || !out) return fail(MMT_ERR_ARGUMENT, "null argument");
    if (opts->n_per_state < 0) return fail(MMT_ERR_ARGUMENT, "negative sample count");
    *out = nullptr;
    return guarded([&] {
        TruncationPolicy policy;
        if (opts->eps_trunc > 0) policy.eps_trunc = opts->eps_trunc;
        if (opts->min_terms > 0) policy.min_terms = opts->min_terms;
        if (opts->max_terms > 0) policy.max_terms = opts->max_terms;
        const int workers = opts->workers > 0 ? opts->workers : 1;
        auto* b = new mmt_batch{simulate_batch(m->impl, static_cast<long>(opts->n_per_state),
                                               opts->seed, workers, policy)};
        *out = b;
        return MMT_OK;
    });
}

void mmt_batch_free(mmt_batch* b) { delete b; }

size_t mmt_batch_states(const mmt_batch* b) { return b ? b->impl.by_state.size() : 0; }

size_t mmt_batch_rows_per_state(const mmt_batch* b) {
    return b ? static_cast<size_t>(b->impl.n_per_state) : 0;
}

mmt_status mmt_batch_record(const mmt_batch* b, size_t state, size_t index, double* r,
                            double* xi0, double* rho0, int* terms) {
    if (!b) return fail(MMT_ERR_ARGUMENT, "null batch");
    if (state >= b->impl.by_state.size() || index >= b->impl.by_state[state].size())
        return fail(MMT_ERR_ARGUMENT, "record index out of range");
    const BatchRecord& rec = b->impl.by_state[state][index];
    if (r) *r = rec.r;
    if (xi0) *xi0 = rec.xi0;
    if (rho0) *rho0 = rec.rho0;
    if (terms) *terms = rec.terms;
    return MMT_OK;
}

mmt_status mmt_batch_to_csv_file(const mmt_batch* b, const char* path) {
    if (!b || !path) return fail(MMT_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream os(path, std::ios::binary);
        if (!os) return fail(MMT_ERR_RUNTIME, std::string("cannot open ") + path);
        os << batch_to_csv(b->impl);
        os.flush();
        return os.good() ? MMT_OK : fail(MMT_ERR_RUNTIME, "write failed");
    });
}

mmt_status mmt_batch_from_csv_file(const char* path, mmt_batch** out) {
    if (!path || !out) return fail(MMT_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream is(path, std::ios::binary);
        if (!is) return fail(MMT_ERR_RUNTIME, std::string("cannot open ") + path);
        std::ostringstream buf;
        buf << is.rdbuf();
        try {
            auto* b = new mmt_batch{batch_from_csv(buf.str())};
            *out = b;
            return MMT_OK;
        } catch (const ComputationError& e) {
            return fail(MMT_ERR_PARSE, e.what());
        }
    });
}

mmt_status mmt_tails(const mmt_model* m, const mmt_batch* b, const mmt_tails_opts* opts,
                     char** json_out) {
    if (!m || !b || !json_out) return fail(MMT_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        require_valid(m->impl);
        SpectralOptions so;
        SpectralAnalysis sp;
        if (opts && opts->kappa > 0) {
            sp.pi = stationary_distribution(m->impl);
            sp.log_rho_mean = mean_log_abs_rho(m->impl, sp.pi);
            sp.kappa = opts->kappa;
            sp.tilt = tilt(m->impl, opts->kappa, so);
        } else {
            sp = analyze_spectral(m->impl, so);
        }
        const StructureReport st = analyze_structure(m->impl);
        TailsOptions to;
        if (opts) {
            if (opts->hill_k > 0) to.hill_k = opts->hill_k;
            if (opts->t_grid && opts->t_grid_len > 0)
                to.t_grid.assign(opts->t_grid, opts->t_grid + opts->t_grid_len);
            if (opts->grid_points > 0) to.grid_points = opts->grid_points;
            if (opts->sym_paths >= 0) to.sym_paths = static_cast<long>(opts->sym_paths);
            to.sym_seed = opts->sym_seed ? opts->sym_seed : 1;
            if (opts->sym_t_grid && opts->sym_t_grid_len > 0)
                to.sym_t_grid.assign(opts->sym_t_grid, opts->sym_t_grid + opts->sym_t_grid_len);
        }
        const TailReport tr = analyze_tails(m->impl, b->impl, sp, st, to);
        return set_out_string(json_out, tail_report_to_json(tr));
    });
}

} // extern "C"
