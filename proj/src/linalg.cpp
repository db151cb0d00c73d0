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

#include "linalg.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace mmtail {

Vec matvec(const Mat& m, const Vec& v) {
    Vec out(static_cast<std::size_t>(m.n), 0.0);
    for (int i = 0; i < m.n; ++i) {
        double acc = 0.0;
        const double* row = &m.a[static_cast<std::size_t>(i) * m.n];
        for (int j = 0; j < m.n; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

Vec vecmat(const Vec& v, const Mat& m) {
    Vec out(static_cast<std::size_t>(m.n), 0.0);
    for (int i = 0; i < m.n; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* row = &m.a[static_cast<std::size_t>(i) * m.n];
        for (int j = 0; j < m.n; ++j) out[j] += vi * row[j];
    }
    return out;
}

namespace {

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Shared body for left/right iterations: apply either M v or v M.
Eig perron_impl(const Mat& m, double tol, int max_iter, bool left) {
    const int n = m.n;
    if (n == 1) {
        Eig e;
        e.value = m.at(0, 0);
        e.vector = {1.0};
        return e;
    }
    Vec v(static_cast<std::size_t>(n), 1.0);
    double r = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec mv = left ? vecmat(v, m) : matvec(m, v);
        double sv = 0.0, smv = 0.0;
        for (int i = 0; i < n; ++i) {
            sv += v[i];
            smv += mv[i];
        }
        r = smv / sv;
        // residual of M v = r v, relative to the scale of r and v
        double res = 0.0;
        for (int i = 0; i < n; ++i) res = std::max(res, std::abs(mv[i] - r * v[i]));
        const double scale = std::max(1.0, std::abs(r)) * std::max(1.0, max_abs(v));
        if (res <= tol * scale) {
            double vmax = max_abs(v);
            for (auto& x : v) x /= vmax;
            return {r, v};
        }
        // (M + I)/2 step, renormalized in max-norm
        double wmax = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = 0.5 * (mv[i] + v[i]);
            wmax = std::max(wmax, std::abs(v[i]));
        }
        if (wmax <= 0.0) throw NonConvergence("power iteration collapsed to zero vector");
        for (auto& x : v) x /= wmax;
    }
    throw NonConvergence("power iteration did not converge");
}

} // namespace

Eig perron_eigenpair(const Mat& m, double tol, int max_iter) {
    return perron_impl(m, tol, max_iter, false);
}

Eig perron_left_eigenpair(const Mat& m, double tol, int max_iter) {
    return perron_impl(m, tol, max_iter, true);
}

Vec solve_dense(Mat m, Vec b) {
    const int n = m.n;
    std::vector<int> piv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double bestv = std::abs(m.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(m.at(r, col));
            if (v > bestv) {
                bestv = v;
                best = r;
            }
        }
        if (bestv < 1e-300) throw std::runtime_error("singular linear system");
        if (best != col) {
            for (int j = 0; j < n; ++j) std::swap(m.at(col, j), m.at(best, j));
            std::swap(b[col], b[best]);
        }
        const double d = m.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = m.at(r, col) / d;
            if (f == 0.0) continue;
            m.at(r, col) = 0.0;
            for (int j = col + 1; j < n; ++j) m.at(r, j) -= f * m.at(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= m.at(i, j) * x[j];
        x[i] = acc / m.at(i, i);
    }
    return x;
}

Vec stationary_left(const Mat& h, double tol) {
    const int n = h.n;
    if (n == 1) return {1.0};
    Vec pi;
    if (n <= 64) {
        // (H^T - I) pi = 0 with the last equation replaced by sum pi = 1
        Mat a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = h.at(j, i) - (i == j ? 1.0 : 0.0);
        Vec b(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) a.at(n - 1, j) = 1.0;
        b[n - 1] = 1.0;
        pi = solve_dense(a, b);
    } else {
        pi = perron_left_eigenpair(h, tol).vector;
    }
    double s = 0.0;
    for (double x : pi) s += x;
    for (auto& x : pi) x /= s;
    // one step of iterative refinement; cheap and tightens the residual
    for (int pass = 0; pass < 4; ++pass) {
        Vec r = vecmat(pi, h);
        double res = 0.0;
        for (int i = 0; i < n; ++i) res = std::max(res, std::abs(r[i] - pi[i]));
        if (res <= tol) break;
        double rs = 0.0;
        for (double x : r) rs += x;
        for (int i = 0; i < n; ++i) pi[i] = r[i] / rs;
    }
    return pi;
}

} // namespace mmtail
