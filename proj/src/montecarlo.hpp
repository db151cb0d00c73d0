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

#pragma once

#include "model.hpp"
#include "rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mmtail {

struct TruncationPolicy {
    double eps_trunc = 1e-12;
    int min_terms = 64;
    int max_terms = 10000;
};

// One draw of R = xi_0 + sum_n xi_n Pi_n under P_x^- by the backward series.
struct BackwardDraw {
    double r = 0.0;
    double xi0 = 0.0, rho0 = 0.0;
    int terms = 0;
    double abs_pi_at_stop = 0.0;
    bool hit_max_terms = false;
    bool divergence_suspected = false; // |Pi_n| > 1/eps before min_terms
    bool overflow = false;
};

BackwardDraw sample_r_backward(const PathTables& tables, int initial_state, Rng& rng,
                               const TruncationPolicy& policy);

// Forward iteration S_k = A_k + B_k S_{k-1} run for burn_in steps from s0.
// The recursion's coefficient pairs traverse the modulating chain in
// reverse, so the draw records burn_in pairs along a path from
// initial_state and folds the recursion through them backwards; the result
// is S_burn_in under P_x^- with the s0 remainder attenuated by the full
// coefficient product.
struct ForwardDraw {
    double value = 0.0;
    long steps = 0;
    bool overflow = false;
};

ForwardDraw sample_r_forward(const PathTables& tables, int initial_state, Rng& rng,
                             long burn_in, double s0);

struct BatchRecord {
    double r;
    double xi0;
    double rho0;
    std::int32_t terms;
};

// Monte Carlo samples of R stratified by initial state. Record (x, i) is a
// pure function of (seed, x, i); see rng.hpp for the stream derivation.
struct SampleBatch {
    std::uint64_t seed = 0;
    std::string scheme;           // stream derivation tag
    TruncationPolicy policy;
    long n_per_state = 0;
    std::vector<std::vector<BatchRecord>> by_state;
    long max_terms_hits = 0;
    long divergence_count = 0;
    long overflow_count = 0;
    double max_abs_pi_at_stop = 0.0;
};

// Throws ComputationError("divergence suspected") when more than 0.1% of
// draws see |Pi_n| exceed 1/eps_trunc before min_terms.
SampleBatch simulate_batch(const MmpModel& model, long n_per_state, std::uint64_t seed,
                           int workers, const TruncationPolicy& policy = {});

// Running prefix data of one backward path, for the symmetrization check:
// m = sup_n |R_n + gamma(x_{n-1}) Pi_n| over n = 0..terms, plus the final R.
struct PathExtremes {
    double r_final = 0.0;
    double sup_abs = 0.0;
};

PathExtremes backward_path_extremes(const PathTables& tables, int initial_state, Rng& rng,
                                    const TruncationPolicy& policy, const Vec& gamma);

// Kolmogorov-Smirnov two-sample statistic (inputs need not be sorted).
double ks_statistic(std::vector<double> a, std::vector<double> b);

// critical value at significance alpha for samples of sizes n and m
double ks_critical(double alpha, std::size_t n, std::size_t m);

} // namespace mmtail
