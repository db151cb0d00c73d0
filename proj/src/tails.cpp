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

#include "tails.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace mmtail {

namespace {
constexpr double kZ95 = 1.959963984540054; // two-sided 95% normal quantile
}

HillEstimate hill_estimator(const std::vector<double>& abs_samples, int k) {
    const std::size_t n = abs_samples.size();
    if (k < 2 || static_cast<std::size_t>(k) >= n)
        throw ComputationError("hill estimator needs 2 <= k < n");
    for (double v : abs_samples)
        if (!(v > 0.0)) throw ComputationError("hill estimator needs positive samples");

    // top k+1 order statistics
    std::vector<double> top(abs_samples);
    std::nth_element(top.begin(), top.begin() + k, top.end(), std::greater<double>());
    const double x_nk = top[static_cast<std::size_t>(k)]; // (k+1)-th largest
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::log(top[static_cast<std::size_t>(i)] / x_nk);
    if (s <= 0.0) throw ComputationError("degenerate upper order statistics");

    HillEstimate out;
    out.k = k;
    out.kappa_hat = static_cast<double>(k) / s;
    const double half = kZ95 / std::sqrt(static_cast<double>(k));
    out.ci_lo = out.kappa_hat * (1.0 - half);
    out.ci_hi = out.kappa_hat * (1.0 + half);
    return out;
}

namespace {

// survival count of v > t in an ascending-sorted sample
long exceed_count(const std::vector<double>& sorted, double t) {
    return static_cast<long>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
}

CurvePoint curve_point(const std::vector<double>& sorted, double t, double kappa) {
    CurvePoint p;
    p.t = t;
    const double n = static_cast<double>(sorted.size());
    p.exceedances = exceed_count(sorted, t);
    p.survival = static_cast<double>(p.exceedances) / n;
    const double tk = std::pow(t, kappa);
    p.value = tk * p.survival;
    // Wilson score interval
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p.survival + z2 / (2.0 * n)) / denom;
    const double half =
        kZ95 * std::sqrt(p.survival * (1.0 - p.survival) / n + z2 / (4.0 * n * n)) / denom;
    p.band_lo = tk * std::max(0.0, center - half);
    p.band_hi = tk * (center + half);
    return p;
}

std::vector<double> sorted_signed(const std::vector<BatchRecord>& recs, int sign) {
    std::vector<double> v;
    v.reserve(recs.size());
    for (const auto& r : recs) v.push_back(sign > 0 ? r.r : -r.r);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

std::vector<StateCurves> tail_curves(const SampleBatch& batch, double kappa,
                                     const std::vector<double>& t_grid) {
    std::vector<StateCurves> out(batch.by_state.size());
    for (std::size_t x = 0; x < batch.by_state.size(); ++x) {
        const auto pos = sorted_signed(batch.by_state[x], +1);
        const auto neg = sorted_signed(batch.by_state[x], -1);
        for (double t : t_grid) {
            out[x].pos.push_back(curve_point(pos, t, kappa));
            out[x].neg.push_back(curve_point(neg, t, kappa));
        }
    }
    return out;
}

std::vector<double> plateau_grid(const std::vector<double>& sorted_abs, int points) {
    const std::size_t n = sorted_abs.size();
    if (n < 1000) return {};
    auto quantile = [&](double q) {
        const std::size_t idx =
            static_cast<std::size_t>(q * static_cast<double>(n - 1));
        return sorted_abs[std::min(idx, n - 1)];
    };
    // survival 1e-3 .. 1e-5, pulled in so the top point keeps >= 100
    // exceedances and the window spans at least a decade of survival
    const double hi_p = std::max(100.0 / static_cast<double>(n), 1e-5);
    const double lo_p = std::max(1e-3, 10.0 * hi_p);
    const double lo = quantile(1.0 - lo_p);
    const double hi = quantile(1.0 - hi_p);
    if (!(hi > lo) || !(lo > 0.0)) return {};
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < points; ++i)
        grid.push_back(lo * std::exp(ratio * i / (points - 1)));
    return grid;
}

PlateauEstimate plateau_estimate(const std::vector<double>& signed_samples, double kappa,
                                 const std::vector<double>& t_grid) {
    PlateauEstimate out;
    if (t_grid.empty() || signed_samples.empty()) return out;
    std::vector<double> sorted(signed_samples);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    const std::size_t m = t_grid.size();
    std::vector<double> tk(m), p(m);
    out.min_point = 1e308;
    for (std::size_t i = 0; i < m; ++i) {
        tk[i] = std::pow(t_grid[i], kappa);
        p[i] = static_cast<double>(exceed_count(sorted, t_grid[i])) / n;
        const double v = tk[i] * p[i];
        out.max_point = std::max(out.max_point, v);
        out.min_point = std::min(out.min_point, v);
        out.value += v / static_cast<double>(m);
    }
    // exact covariance of nested survival counts: for t_i <= t_j,
    // cov(p_i, p_j) = p_j (1 - p_i) / n
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t a = std::min(i, j), b = std::max(i, j);
            var += tk[i] * tk[j] * p[b] * (1.0 - p[a]) / n;
        }
    out.se = std::sqrt(std::max(0.0, var)) / static_cast<double>(m);
    out.window_lo = t_grid.front();
    out.window_hi = t_grid.back();
    out.valid = true;
    return out;
}

namespace {

struct MeanVar {
    double mean = 0.0;
    double se = 0.0;
};

// mean and standard error of f over a state's records
template <typename F>
MeanVar record_mean(const std::vector<BatchRecord>& recs, F&& f) {
    MeanVar mv;
    if (recs.empty()) return mv;
    double acc = 0.0;
    for (const auto& r : recs) acc += f(r);
    mv.mean = acc / static_cast<double>(recs.size());
    double ss = 0.0;
    for (const auto& r : recs) {
        const double d = f(r) - mv.mean;
        ss += d * d;
    }
    const double n = static_cast<double>(recs.size());
    mv.se = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return mv;
}

double pow_pos(double v, double kappa) { return v > 0.0 ? std::pow(v, kappa) : 0.0; }

ConstantEstimates assemble_from_state_means(const SpectralAnalysis& sp,
                                            const std::vector<MeanVar>& mv1,
                                            const std::vector<MeanVar>& mvneg, double prefactor) {
    // K_eta(z) = h(z) * prefactor * sum_x pi_h(x)/h(x) * mean_x
    const std::size_t s = sp.tilt.h.size();
    double acc1 = 0.0, accn = 0.0, var1 = 0.0, varn = 0.0;
    for (std::size_t x = 0; x < s; ++x) {
        const double wgt = sp.tilt.pi_h[x] / sp.tilt.h[x];
        acc1 += wgt * mv1[x].mean;
        accn += wgt * mvneg[x].mean;
        var1 += wgt * wgt * mv1[x].se * mv1[x].se;
        varn += wgt * wgt * mvneg[x].se * mvneg[x].se;
    }
    ConstantEstimates out;
    out.k1.resize(s);
    out.k1_se.resize(s);
    out.kneg1.resize(s);
    out.kneg1_se.resize(s);
    for (std::size_t z = 0; z < s; ++z) {
        const double f = sp.tilt.h[z] * prefactor;
        out.k1[z] = f * acc1;
        out.k1_se[z] = f * std::sqrt(var1);
        out.kneg1[z] = f * accn;
        out.kneg1_se[z] = f * std::sqrt(varn);
    }
    return out;
}

} // namespace

ConstantEstimates goldie_constant_positive(const MmpModel& model, const SpectralAnalysis& spectral,
                                           const SampleBatch& batch) {
    for (const Edge& ed : model.edges)
        for (const Atom& a : ed.atoms)
            if (!(a.xi > 0.0) || !(a.rho > 0.0))
                throw ComputationError("regime violation: positive-coefficient formula needs xi > 0 and rho > 0");

    const double kappa = spectral.kappa;
    const std::size_t s = batch.by_state.size();
    std::vector<MeanVar> mv(s), zero(s);
    for (std::size_t x = 0; x < s; ++x)
        mv[x] = record_mean(batch.by_state[x], [kappa](const BatchRecord& r) {
            return std::pow(r.r, kappa) - std::pow(r.r - r.xi0, kappa);
        });
    ConstantEstimates out =
        assemble_from_state_means(spectral, mv, zero, 1.0 / (spectral.tilt.drift * kappa));
    out.branch = "positive";
    return out;
}

ConstantEstimates goldie_constant_mixed(const MmpModel& model, const SpectralAnalysis& spectral,
                                        const ConditionG& cond_g, const SampleBatch& batch) {
    (void)model;
    const double kappa = spectral.kappa;
    const std::size_t s = batch.by_state.size();

    if (cond_g.holds) {
        std::vector<MeanVar> mv(s);
        for (std::size_t x = 0; x < s; ++x)
            mv[x] = record_mean(batch.by_state[x], [kappa](const BatchRecord& r) {
                return std::pow(std::abs(r.r), kappa) - std::pow(std::abs(r.r - r.xi0), kappa);
            });
        ConstantEstimates out =
            assemble_from_state_means(spectral, mv, mv, 0.5 / (spectral.tilt.drift * kappa));
        out.branch = "mixed-conditionG";
        return out;
    }

    // partition branch: the sign layer attached to x in the component of
    // (z, +1) is gamma * c(x) with gamma = c(z); integrating g over that
    // component gives, per eta, the c(x)-signed positive-part differences
    std::vector<int> c(s, -1);
    for (int x : cond_g.a1) c[static_cast<std::size_t>(x)] = +1;

    std::vector<MeanVar> mv_plus(s), mv_minus(s); // E[((sR)+)^k - ((s(R-xi0))+)^k], s = +-c(x)
    for (std::size_t x = 0; x < s; ++x) {
        const double sgn = c[x];
        mv_plus[x] = record_mean(batch.by_state[x], [kappa, sgn](const BatchRecord& r) {
            return pow_pos(sgn * r.r, kappa) - pow_pos(sgn * (r.r - r.xi0), kappa);
        });
        mv_minus[x] = record_mean(batch.by_state[x], [kappa, sgn](const BatchRecord& r) {
            return pow_pos(-sgn * r.r, kappa) - pow_pos(-sgn * (r.r - r.xi0), kappa);
        });
    }
    // For eta = +1 and z with c(z) = gamma: layer sign at x is gamma*c(x),
    // and eta*gamma*c(x)*c(z-free) reduces to c(z)*c(x)-signed means; the
    // z-dependence beyond h(z) enters only through c(z).
    const std::size_t n_states = s;
    ConstantEstimates out;
    out.branch = "mixed-partition";
    out.k1.resize(n_states);
    out.k1_se.resize(n_states);
    out.kneg1.resize(n_states);
    out.kneg1_se.resize(n_states);
    const double pre = 1.0 / (spectral.tilt.drift * kappa);
    for (std::size_t z = 0; z < n_states; ++z) {
        const int gamma = c[z];
        double acc_p = 0.0, var_p = 0.0, acc_m = 0.0, var_m = 0.0;
        for (std::size_t x = 0; x < n_states; ++x) {
            const double wgt = spectral.tilt.pi_h[x] / spectral.tilt.h[x];
            // eta = +1: sign at x is (+1)*gamma*c(x); our mv_plus is c(x)-signed
            const MeanVar& for_pos = gamma > 0 ? mv_plus[x] : mv_minus[x];
            const MeanVar& for_neg = gamma > 0 ? mv_minus[x] : mv_plus[x];
            acc_p += wgt * for_pos.mean;
            var_p += wgt * wgt * for_pos.se * for_pos.se;
            acc_m += wgt * for_neg.mean;
            var_m += wgt * wgt * for_neg.se * for_neg.se;
        }
        const double f = spectral.tilt.h[z] * pre;
        out.k1[z] = f * acc_p;
        out.k1_se[z] = f * std::sqrt(var_p);
        out.kneg1[z] = f * acc_m;
        out.kneg1_se[z] = f * std::sqrt(var_m);
    }
    return out;
}

Vec median_gamma(const SampleBatch& batch) {
    Vec out(batch.by_state.size(), 0.0);
    for (std::size_t x = 0; x < batch.by_state.size(); ++x) {
        const auto& recs = batch.by_state[x];
        if (recs.empty()) throw ComputationError("median needs a nonempty batch per state");
        std::vector<double> v;
        v.reserve(recs.size());
        for (const auto& r : recs) v.push_back(r.r);
        const std::size_t k = v.size() / 2; // lower median: inf{a : F(a) > 1/2}
        std::nth_element(v.begin(), v.begin() + static_cast<long>(k), v.end());
        out[x] = v[k];
    }
    return out;
}

std::vector<SymmetrizationRow> symmetrization_check(const MmpModel& model, const Vec& gamma,
                                                    const std::vector<double>& t_grid,
                                                    long n_paths, std::uint64_t seed,
                                                    const TruncationPolicy& policy) {
    const PathTables tables(model);
    const int n_states = model.size();
    std::vector<SymmetrizationRow> rows;
    for (int x = 0; x < n_states; ++x) {
        std::vector<double> abs_r;
        std::vector<double> sup_abs;
        abs_r.reserve(static_cast<std::size_t>(n_paths));
        sup_abs.reserve(static_cast<std::size_t>(n_paths));
        for (long i = 0; i < n_paths; ++i) {
            // stream domain offset keeps these paths disjoint from batches
            Rng rng = stream_for(mix64(seed ^ 0x53594d4dULL), static_cast<std::uint64_t>(x),
                                 static_cast<std::uint64_t>(i));
            const PathExtremes pe = backward_path_extremes(tables, x, rng, policy, gamma);
            abs_r.push_back(std::abs(pe.r_final));
            sup_abs.push_back(pe.sup_abs);
        }
        const double n = static_cast<double>(n_paths);
        for (double t : t_grid) {
            long na = 0, nb = 0, nab = 0;
            for (long i = 0; i < n_paths; ++i) {
                const bool a = abs_r[static_cast<std::size_t>(i)] >= t;
                const bool b = sup_abs[static_cast<std::size_t>(i)] > t;
                na += a;
                nb += b;
                nab += a && b;
            }
            SymmetrizationRow row;
            row.state = x;
            row.t = t;
            row.lhs = static_cast<double>(na) / n;
            row.rhs_half = 0.5 * static_cast<double>(nb) / n;
            const double pa = row.lhs, pb = static_cast<double>(nb) / n;
            const double pab = static_cast<double>(nab) / n;
            const double var =
                (pa * (1.0 - pa) + 0.25 * pb * (1.0 - pb) - (pab - pa * pb)) / n;
            row.se = std::sqrt(std::max(0.0, var));
            row.pass = row.lhs >= row.rhs_half - 3.0 * row.se;
            rows.push_back(row);
        }
    }
    return rows;
}

TailReport analyze_tails(const MmpModel& model, const SampleBatch& batch,
                         const SpectralAnalysis& spectral, const StructureReport& structure,
                         const TailsOptions& opts) {
    TailReport out;
    out.kappa = spectral.kappa;
    const std::size_t s = batch.by_state.size();

    // pooled |R| for Hill; meaningless on a deterministic R
    std::vector<double> pooled;
    for (const auto& recs : batch.by_state)
        for (const auto& r : recs) pooled.push_back(std::abs(r.r));
    if (structure.degeneracy.degenerate) {
        out.hill_skip_reason = "degenerate model: R is deterministic given the initial state";
    } else {
        int k = opts.hill_k;
        if (k <= 0)
            k = static_cast<int>(
                std::min(1e4, std::pow(static_cast<double>(pooled.size()), 2.0 / 3.0)));
        try {
            out.hill = hill_estimator(pooled, k);
        } catch (const ComputationError& e) {
            out.hill_skip_reason = e.what();
        }
    }

    // grid: user-provided or plateau window of pooled |R|
    out.t_grid = opts.t_grid;
    if (out.t_grid.empty()) {
        std::vector<double> sorted_abs(pooled);
        std::sort(sorted_abs.begin(), sorted_abs.end());
        out.t_grid = plateau_grid(sorted_abs, opts.grid_points);
    }
    if (!out.t_grid.empty()) out.curves = tail_curves(batch, spectral.kappa, out.t_grid);

    out.plateau_pos.resize(s);
    out.plateau_neg.resize(s);
    out.plateau_abs.resize(s);
    for (std::size_t x = 0; x < s; ++x) {
        std::vector<double> pos, neg, abs_v;
        pos.reserve(batch.by_state[x].size());
        for (const auto& r : batch.by_state[x]) {
            pos.push_back(r.r);
            neg.push_back(-r.r);
            abs_v.push_back(std::abs(r.r));
        }
        out.plateau_pos[x] = plateau_estimate(pos, spectral.kappa, out.t_grid);
        out.plateau_neg[x] = plateau_estimate(neg, spectral.kappa, out.t_grid);
        out.plateau_abs[x] = plateau_estimate(abs_v, spectral.kappa, out.t_grid);
    }

    out.medians = median_gamma(batch);

    if (structure.degeneracy.degenerate) {
        out.constants.branch = "degenerate";
        out.constants.k1.assign(s, 0.0);
        out.constants.k1_se.assign(s, 0.0);
        out.constants.kneg1.assign(s, 0.0);
        out.constants.kneg1_se.assign(s, 0.0);
    } else {
        bool all_positive = true;
        for (const Edge& ed : model.edges)
            for (const Atom& a : ed.atoms)
                if (!(a.xi > 0.0) || !(a.rho > 0.0)) all_positive = false;
        out.constants = all_positive
                            ? goldie_constant_positive(model, spectral, batch)
                            : goldie_constant_mixed(model, spectral, structure.condition_g, batch);
    }

    if (opts.sym_paths > 0) {
        const std::vector<double> sym_grid =
            opts.sym_t_grid.empty() ? std::vector<double>{10.0, 50.0, 100.0} : opts.sym_t_grid;
        out.symmetrization = symmetrization_check(model, out.medians, sym_grid, opts.sym_paths,
                                                  opts.sym_seed, batch.policy);
    }
    return out;
}

} // namespace mmtail
