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

#include "montecarlo.hpp"
#include "spectral.hpp"
#include "structure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mmtail {

struct HillEstimate {
    double kappa_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0; // kappa_hat * (1 +- 1.96/sqrt(k))
    int k = 0;
};

// Hill estimator on the k upper order statistics of |R|.
// Throws ComputationError("degenerate upper order statistics") on ties
// that zero the log-spacing sum.
HillEstimate hill_estimator(const std::vector<double>& abs_samples, int k);

struct CurvePoint {
    double t = 0.0;
    double value = 0.0;   // t^kappa * empirical survival
    double band_lo = 0.0; // Wilson score band, scaled by t^kappa
    double band_hi = 0.0;
    double survival = 0.0;
    long exceedances = 0;
};

// t^kappa weighted empirical survival of eta*R for both signs, per state.
struct StateCurves {
    std::vector<CurvePoint> pos; // eta = +1: P(R > t)
    std::vector<CurvePoint> neg; // eta = -1: P(R < -t)
};

std::vector<StateCurves> tail_curves(const SampleBatch& batch, double kappa,
                                     const std::vector<double>& t_grid);

// Plateau window of |R|: survival from max(1e-3, 10 * hi_p) down to
// hi_p = max(100/n, 1e-5) on a geometric grid, so the top point keeps at
// least 100 exceedances. The plateau estimate is the grid mean of the
// t^kappa-weighted survival with its standard error from the exact
// nested-count covariance.
struct PlateauEstimate {
    double value = 0.0;
    double se = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double max_point = 0.0, min_point = 0.0; // window extremes (bounds check)
    bool valid = false;
};

std::vector<double> plateau_grid(const std::vector<double>& sorted_abs, int points);

PlateauEstimate plateau_estimate(const std::vector<double>& signed_samples, double kappa,
                                 const std::vector<double>& t_grid);

// Tail-constant estimates from the moment-difference formulas, using the
// paired (R, xi_0) records of the batch.
struct ConstantEstimates {
    std::string branch; // "positive", "mixed-conditionG", "mixed-partition", "degenerate"
    Vec k1, k1_se;      // per conditioning state
    Vec kneg1, kneg1_se;
};

// Positive-coefficient branch: K(z) = h(z)/(drift*kappa) *
// sum_x pi_h(x)/h(x) E_x[R^kappa - (R-xi_0)^kappa]. Requires every atom
// to have xi > 0 and rho > 0, else throws ComputationError("regime violation").
ConstantEstimates goldie_constant_positive(const MmpModel& model, const SpectralAnalysis& spectral,
                                           const SampleBatch& batch);

// Mixed-sign branch. Under Condition G both constants equal
// h(z)/(2*drift*kappa) sum_x pi_h(x)/h(x) E_x[|R|^kappa - |R-xi_0|^kappa].
// Without Condition G the two sign layers are integrated separately over
// the witness partition; the component-restricted stationary measure has
// full mass, so no extra 1/2 appears.
ConstantEstimates goldie_constant_mixed(const MmpModel& model, const SpectralAnalysis& spectral,
                                        const ConditionG& cond_g, const SampleBatch& batch);

// Per-state lower sample median (the inf-definition of the median).
Vec median_gamma(const SampleBatch& batch);

struct SymmetrizationRow {
    int state = 0;
    double t = 0.0;
    double lhs = 0.0;      // P(|R| >= t)
    double rhs_half = 0.0; // P(sup_n |R_n + Gamma(x_{n-1}) Pi_n| > t) / 2
    double se = 0.0;       // of lhs - rhs_half
    bool pass = false;     // lhs >= rhs_half - 3 se
};

std::vector<SymmetrizationRow> symmetrization_check(const MmpModel& model, const Vec& gamma,
                                                    const std::vector<double>& t_grid,
                                                    long n_paths, std::uint64_t seed,
                                                    const TruncationPolicy& policy = {});

struct TailsOptions {
    int hill_k = 0;              // 0: n^(2/3) capped at 10^4
    std::vector<double> t_grid;  // empty: auto plateau window grid
    int grid_points = 12;
    long sym_paths = 100000;
    std::uint64_t sym_seed = 1;
    std::vector<double> sym_t_grid; // empty: {10, 50, 100}
};

struct TailReport {
    double kappa = 0.0;
    std::optional<HillEstimate> hill; // absent when upper order statistics degenerate
    std::string hill_skip_reason;
    std::vector<double> t_grid;
    std::vector<StateCurves> curves;
    std::vector<PlateauEstimate> plateau_pos, plateau_neg, plateau_abs;
    ConstantEstimates constants;
    Vec medians;
    std::vector<SymmetrizationRow> symmetrization;
};

TailReport analyze_tails(const MmpModel& model, const SampleBatch& batch,
                         const SpectralAnalysis& spectral, const StructureReport& structure,
                         const TailsOptions& opts = {});

} // namespace mmtail
