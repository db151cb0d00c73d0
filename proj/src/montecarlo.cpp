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

#include "montecarlo.hpp"

#include "errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace mmtail {

namespace {
constexpr const char* kSchemeTag = "xoshiro256pp-sm64-v1";
}

BackwardDraw sample_r_backward(const PathTables& tables, int initial_state, Rng& rng,
                               const TruncationPolicy& policy) {
    BackwardDraw out;
    const double guard = 1.0 / policy.eps_trunc;
    long double r = 0.0L;
    long double pi = 1.0L;
    int state = initial_state;
    int n = 0;
    while (true) {
        const auto s = tables.step(state, rng);
        state = s.next_state;
        if (n == 0) {
            out.xi0 = s.xi;
            out.rho0 = s.rho;
        }
        r += static_cast<long double>(s.xi) * pi;
        pi *= s.rho;
        ++n;
        const double api = static_cast<double>(pi < 0.0L ? -pi : pi);
        if (n < policy.min_terms && api > guard) out.divergence_suspected = true;
        if (n >= policy.min_terms && api < policy.eps_trunc) {
            out.abs_pi_at_stop = api;
            break;
        }
        if (n >= policy.max_terms) {
            out.hit_max_terms = true;
            out.abs_pi_at_stop = api;
            break;
        }
    }
    out.terms = n;
    out.r = static_cast<double>(r);
    if (!std::isfinite(out.r)) {
        out.overflow = true;
        out.r = std::clamp(out.r, -1e308, 1e308);
    }
    return out;
}

ForwardDraw sample_r_forward(const PathTables& tables, int initial_state, Rng& rng,
                             long burn_in, double s0) {
    // The recursion pairs (A_k, B_k) pace the modulating chain backwards
    // (the series solution reads A_{-n}), so S_burn_in is realized by
    // recording burn_in pairs along the chain from the conditioning state
    // and folding the recursion from s0 through them in reverse. The fold
    // equals the truncated series plus the s0 remainder under the full
    // coefficient product.
    ForwardDraw out;
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(burn_in));
    int state = initial_state;
    for (long k = 0; k < burn_in; ++k) {
        const auto s = tables.step(state, rng);
        state = s.next_state;
        pairs.emplace_back(s.xi, s.rho);
    }
    long double val = s0;
    for (std::size_t j = pairs.size(); j-- > 0;) {
        val = static_cast<long double>(pairs[j].first) +
              static_cast<long double>(pairs[j].second) * val;
        if (!std::isfinite(static_cast<double>(val))) {
            out.overflow = true;
            val = 0.0L; // drop the exploded prefix; the flag is reported upstream
        }
    }
    out.value = static_cast<double>(val);
    out.steps = burn_in;
    return out;
}

SampleBatch simulate_batch(const MmpModel& model, long n_per_state, std::uint64_t seed,
                           int workers, const TruncationPolicy& policy) {
    require_valid(model);
    const int n_states = model.size();
    const PathTables tables(model);

    SampleBatch batch;
    batch.seed = seed;
    batch.scheme = kSchemeTag;
    batch.policy = policy;
    batch.n_per_state = n_per_state;
    batch.by_state.resize(static_cast<std::size_t>(n_states));
    for (auto& v : batch.by_state) v.resize(static_cast<std::size_t>(n_per_state));

    const long total = static_cast<long>(n_states) * n_per_state;
    if (total == 0) return batch;

    const int nw = std::max(1, workers);
    std::atomic<long> max_hits{0}, divergences{0}, overflows{0};
    std::atomic<double> max_pi_stop{0.0};

    auto run_range = [&](long begin, long end) {
        long local_hits = 0, local_div = 0, local_ovf = 0;
        double local_max_pi = 0.0;
        for (long g = begin; g < end; ++g) {
            const int x = static_cast<int>(g / n_per_state);
            const long i = g % n_per_state;
            Rng rng = stream_for(seed, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(i));
            const BackwardDraw d = sample_r_backward(tables, x, rng, policy);
            batch.by_state[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)] =
                {d.r, d.xi0, d.rho0, d.terms};
            if (d.hit_max_terms) ++local_hits;
            if (d.divergence_suspected) ++local_div;
            if (d.overflow) ++local_ovf;
            local_max_pi = std::max(local_max_pi, d.abs_pi_at_stop);
        }
        max_hits += local_hits;
        divergences += local_div;
        overflows += local_ovf;
        double prev = max_pi_stop.load();
        while (prev < local_max_pi && !max_pi_stop.compare_exchange_weak(prev, local_max_pi)) {
        }
    };

    if (nw == 1) {
        run_range(0, total);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (total + nw - 1) / nw;
        for (int w = 0; w < nw; ++w) {
            const long begin = w * chunk;
            const long end = std::min(total, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    batch.max_terms_hits = max_hits.load();
    batch.divergence_count = divergences.load();
    batch.overflow_count = overflows.load();
    batch.max_abs_pi_at_stop = max_pi_stop.load();

    if (batch.divergence_count * 1000L > total)
        throw ComputationError("divergence suspected: |Pi_n| exceeded 1/eps before min_terms on >0.1% of samples");
    return batch;
}

PathExtremes backward_path_extremes(const PathTables& tables, int initial_state, Rng& rng,
                                    const TruncationPolicy& policy, const Vec& gamma) {
    PathExtremes out;
    long double r = 0.0L;
    long double pi = 1.0L;
    int prev_state = initial_state;
    int state = initial_state;
    // n = 0 term: R_0 = 0, Pi_0 = 1, x_{-1} = initial_state
    out.sup_abs = std::abs(gamma[static_cast<std::size_t>(initial_state)]);
    int n = 0;
    while (true) {
        const auto s = tables.step(state, rng);
        prev_state = state;
        state = s.next_state;
        r += static_cast<long double>(s.xi) * pi;
        pi *= s.rho;
        ++n;
        const double cand = std::abs(static_cast<double>(
            r + static_cast<long double>(gamma[static_cast<std::size_t>(prev_state)]) * pi));
        out.sup_abs = std::max(out.sup_abs, cand);
        const double api = static_cast<double>(pi < 0.0L ? -pi : pi);
        if ((n >= policy.min_terms && api < policy.eps_trunc) || n >= policy.max_terms) break;
    }
    out.r_final = static_cast<double>(r);
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

} // namespace mmtail
