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

#include <cstddef>
#include <vector>

namespace mmtail {

using Vec = std::vector<double>;

// Dense square row-major matrix; all matrices in this project are tiny
// (state-space sized), so no effort is spent on blocking or BLAS.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

Vec matvec(const Mat& m, const Vec& v);
Vec vecmat(const Vec& v, const Mat& m);

struct Eig {
    double value = 0.0;
    Vec vector; // strictly positive, normalized to max entry 1
};

// Perron eigenpair of an irreducible nonnegative matrix by power iteration
// on (M + I)/2; the averaging kills the rotational spectrum of periodic
// matrices, the eigenvalue is recovered from M itself.
// Throws NonConvergence after the iteration cap.
Eig perron_eigenpair(const Mat& m, double tol, int max_iter = 200000);

// Left Perron eigenpair (row vector p with pM = r p).
Eig perron_left_eigenpair(const Mat& m, double tol, int max_iter = 200000);

// Solve M x = b by Gaussian elimination with partial pivoting.
// Throws std::runtime_error on a (numerically) singular system.
Vec solve_dense(Mat m, Vec b);

// Stationary distribution of a row-stochastic matrix: dense solve for
// n <= 64, power iteration above; the caller checks the residual either way.
Vec stationary_left(const Mat& h, double tol);

} // namespace mmtail
