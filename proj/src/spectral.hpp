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

#include "linalg.hpp"
#include "model.hpp"

#include <utility>
#include <vector>

namespace mmtail {

struct SpectralOptions {
    double spectral_tol = 1e-12; // eigen residual
    double kappa_tol = 1e-10;    // |Lambda(kappa)| at the root
    double beta_max = 64.0;      // bracket cap for the root search
};

// Weighted transfer matrix: entry (i,j) = H[i][j] * sum_k w_k |rho_k|^beta.
Mat build_kernel_beta(const MmpModel& model, double beta);

// Perron root and positive eigenvector (max entry 1) of an irreducible
// nonnegative matrix; periodicity is handled by the (M+I)/2 averaging.
Eig spectral_radius(const Mat& m, double tol);

// Lambda(beta) = log spectral radius of the beta-weighted kernel.
double lambda_fn(const MmpModel& model, double beta, double tol = 1e-12);

// The positive root of Lambda, distinct from the trivial root at 0.
//
// Bracket search: step right from 0 until Lambda < 0, then double until
// Lambda >= 0 (capped at beta_max), then bisect. Throws AssumptionError
// "contractive-at-zero violated" when Lambda'(0) >= 0 and "no sign change"
// when Lambda stays negative up to beta_max.
double solve_kappa(const MmpModel& model, const SpectralOptions& opts = {});

// Exponential tilt at beta = kappa.
struct TiltResult {
    Vec h;                                    // positive eigenfunction, max entry 1
    Mat tilted_transition;                    // H~[i][j] = H_k[i][j] h(j)/h(i)
    std::vector<std::vector<double>> tilted_atoms; // per edge: w~_k proportional to w_k |rho_k|^kappa
    Vec pi_h;                                 // stationary distribution of H~
    double drift = 0.0;                       // E~ log|rho_0| under the reweighted tilt
    double drift_unweighted = 0.0;            // same with original atom weights (diagnostic)
};

// Throws AssumptionError("nonpositive drift") when the tilted walk fails
// to drift upward, which signals a mis-solved kappa or degenerate input.
TiltResult tilt(const MmpModel& model, double kappa, const SpectralOptions& opts = {});

struct SpectralAnalysis {
    std::vector<std::pair<double, double>> beta_grid; // (beta, Lambda(beta))
    double kappa = 0.0;
    TiltResult tilt;
    Vec pi;                    // stationary distribution of H
    double log_rho_mean = 0.0; // E_pi log|rho| = Lambda'(0)
};

SpectralAnalysis analyze_spectral(const MmpModel& model, const SpectralOptions& opts = {},
                                  int grid_points = 33);

// (1/n) log (H_beta^n 1)(x) for every state, computed with running
// rescaling; finite-n growth probe used by the consistency checks.
Vec finite_n_growth(const MmpModel& model, double beta, int n);

} // namespace mmtail
