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

#include "spectral.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace mmtail {

Mat build_kernel_beta(const MmpModel& model, double beta) {
    const int n = model.size();
    Mat out(n);
    for (const Edge& ed : model.edges) {
        double m = 0.0;
        for (const Atom& a : ed.atoms) m += a.w * std::pow(std::abs(a.rho), beta);
        out.at(ed.from, ed.to) = ed.prob * m;
    }
    return out;
}

Eig spectral_radius(const Mat& m, double tol) { return perron_eigenpair(m, tol); }

double lambda_fn(const MmpModel& model, double beta, double tol) {
    return std::log(spectral_radius(build_kernel_beta(model, beta), tol).value);
}

double solve_kappa(const MmpModel& model, const SpectralOptions& opts) {
    const double tol = opts.spectral_tol;
    const Vec pi = stationary_distribution(model);
    if (mean_log_abs_rho(model, pi) >= 0.0)
        throw AssumptionError("contractive-at-zero violated: E_pi log|rho| >= 0");

    // walk right until Lambda goes negative, shrinking if we land past the root
    double beta_lo = 0.0625;
    while (lambda_fn(model, beta_lo, tol) >= 0.0) {
        beta_lo *= 0.5;
        if (beta_lo < 1e-9)
            throw AssumptionError("contractive-at-zero violated: no negative dip right of 0");
    }

    double beta_hi = beta_lo;
    double lam_hi;
    do {
        beta_hi *= 2.0;
        if (beta_hi > opts.beta_max)
            throw AssumptionError("no sign change: Lambda stays negative up to beta_max");
        lam_hi = lambda_fn(model, beta_hi, tol);
    } while (lam_hi < 0.0);

    double lo = beta_lo, hi = beta_hi;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lambda_fn(model, mid, tol) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double kappa = 0.5 * (lo + hi);
    if (std::abs(lambda_fn(model, kappa, tol)) > opts.kappa_tol)
        throw NonConvergence("kappa root residual exceeds tolerance");
    if (!(lambda_fn(model, 0.5 * kappa, tol) < 0.0))
        throw AssumptionError("root bracket check failed: Lambda(kappa/2) not negative");
    return kappa;
}

TiltResult tilt(const MmpModel& model, double kappa, const SpectralOptions& opts) {
    const int n = model.size();
    const Mat hk = build_kernel_beta(model, kappa);
    const Eig eig = spectral_radius(hk, opts.spectral_tol);
    if (std::abs(std::log(eig.value)) > 100 * opts.kappa_tol)
        throw AssumptionError("tilt requires |Lambda(kappa)| within tolerance");

    TiltResult out;
    out.h = eig.vector;
    out.tilted_transition = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.tilted_transition.at(i, j) = hk.at(i, j) * out.h[j] / (eig.value * out.h[i]);

    out.tilted_atoms.resize(model.edges.size());
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& ed = model.edges[e];
        auto& w = out.tilted_atoms[e];
        w.resize(ed.atoms.size());
        double norm = 0.0;
        for (std::size_t k = 0; k < ed.atoms.size(); ++k) {
            w[k] = ed.atoms[k].w * std::pow(std::abs(ed.atoms[k].rho), kappa);
            norm += w[k];
        }
        for (auto& x : w) x /= norm;
    }

    out.pi_h = stationary_left(out.tilted_transition, opts.spectral_tol);

    double drift = 0.0, drift_unweighted = 0.0;
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& ed = model.edges[e];
        const double mass = out.pi_h[static_cast<std::size_t>(ed.from)] *
                            out.tilted_transition.at(ed.from, ed.to);
        double tilted_mean = 0.0, plain_mean = 0.0;
        for (std::size_t k = 0; k < ed.atoms.size(); ++k) {
            const double lr = std::log(std::abs(ed.atoms[k].rho));
            tilted_mean += out.tilted_atoms[e][k] * lr;
            plain_mean += ed.atoms[k].w * lr;
        }
        drift += mass * tilted_mean;
        drift_unweighted += mass * plain_mean;
    }
    out.drift = drift;
    out.drift_unweighted = drift_unweighted;
    if (!(drift > 0.0)) throw AssumptionError("nonpositive drift under the tilted measure");
    return out;
}

SpectralAnalysis analyze_spectral(const MmpModel& model, const SpectralOptions& opts,
                                  int grid_points) {
    SpectralAnalysis out;
    out.pi = stationary_distribution(model);
    out.log_rho_mean = mean_log_abs_rho(model, out.pi);
    out.kappa = solve_kappa(model, opts);
    out.tilt = tilt(model, out.kappa, opts);

    const double top = 2.0 * out.kappa;
    const int pts = std::max(grid_points, 3);
    out.beta_grid.reserve(static_cast<std::size_t>(pts));
    for (int i = 0; i < pts; ++i) {
        const double beta = top * i / (pts - 1);
        out.beta_grid.emplace_back(beta, lambda_fn(model, beta, opts.spectral_tol));
    }
    return out;
}

Vec finite_n_growth(const MmpModel& model, double beta, int n) {
    const Mat hb = build_kernel_beta(model, beta);
    const int s = model.size();
    Vec v(static_cast<std::size_t>(s), 1.0);
    double logscale = 0.0;
    for (int it = 0; it < n; ++it) {
        v = matvec(hb, v);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        logscale += std::log(vmax);
        for (auto& x : v) x /= vmax;
    }
    Vec out(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) out[i] = (std::log(v[i]) + logscale) / n;
    return out;
}

} // namespace mmtail
