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

#include "structure.hpp"

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

namespace mmtail {

PeriodClasses period_and_classes(const MmpModel& model) {
    const int n = model.size();
    // BFS distances from state 0; the period is the gcd of
    // dist[u] + 1 - dist[v] over all edges (u -> v).
    std::vector<long> dist(static_cast<std::size_t>(n), -1);
    std::deque<int> q{0};
    dist[0] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v = 0; v < n; ++v)
            if (model.transition.at(u, v) > 0.0 && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    long d = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (model.transition.at(u, v) > 0.0)
                d = std::gcd(d, dist[u] + 1 - dist[v]);
    if (d == 0) d = 1;

    PeriodClasses out;
    out.period = static_cast<int>(d);
    out.classes.assign(static_cast<std::size_t>(d), {});
    for (int u = 0; u < n; ++u)
        out.classes[static_cast<std::size_t>(((dist[u] % d) + d) % d)].push_back(u);
    return out;
}

namespace {

// adjacency of the augmented graph: node id = 2*state + (sign<0 ? 1 : 0)
std::vector<std::vector<int>> augmented_adjacency(const MmpModel& model) {
    const int n = model.size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(2 * n));
    for (const Edge& ed : model.edges) {
        bool pos = false, neg = false;
        for (const Atom& a : ed.atoms) {
            if (a.rho > 0.0)
                pos = true;
            else
                neg = true;
        }
        for (int layer = 0; layer < 2; ++layer) {
            const int from = 2 * ed.from + layer;
            if (pos) adj[static_cast<std::size_t>(from)].push_back(2 * ed.to + layer);
            if (neg) adj[static_cast<std::size_t>(from)].push_back(2 * ed.to + (1 - layer));
        }
    }
    for (auto& v : adj) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return adj;
}

std::vector<char> reachable_from(const std::vector<std::vector<int>>& adj, int start) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
    }
    return seen;
}

} // namespace

ConditionG check_condition_g(const MmpModel& model) {
    const int n = model.size();
    const auto adj = augmented_adjacency(model);
    const auto seen = reachable_from(adj, 0); // (state 0, +1)

    ConditionG out;
    const bool all = std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    if (all) {
        // both signed copies of some state are reachable, which forces the
        // whole augmented graph into one communicating class
        out.holds = true;
        out.components = 1;
        return out;
    }

    out.holds = false;
    out.components = 2;
    for (int x = 0; x < n; ++x) {
        const bool plus = seen[static_cast<std::size_t>(2 * x)] != 0;
        const bool minus = seen[static_cast<std::size_t>(2 * x + 1)] != 0;
        if (plus == minus)
            throw ComputationError("augmented reachability did not split into signed classes");
        (plus ? out.a1 : out.a_neg1).push_back(x);
    }

    // verify the two identities of the witness partition exactly
    std::vector<char> in_a1(static_cast<std::size_t>(n), 0);
    for (int x : out.a1) in_a1[static_cast<std::size_t>(x)] = 1;
    for (const Edge& ed : model.edges)
        for (const Atom& a : ed.atoms) {
            const bool same = in_a1[static_cast<std::size_t>(ed.from)] ==
                              in_a1[static_cast<std::size_t>(ed.to)];
            if ((a.rho > 0.0 && !same) || (a.rho < 0.0 && same))
                throw ComputationError("condition G witness partition failed verification");
        }
    return out;
}

Degeneracy check_degeneracy(const MmpModel& model, double tol) {
    const int n = model.size();
    // Gamma(x) = offset[x] + slope[x] * g with g = Gamma(0) unknown;
    // every atom on edge (i,j) imposes xi + Gamma(j) rho = Gamma(i), which
    // determines either endpoint affinely from the other (rho != 0).
    std::vector<double> offset(static_cast<std::size_t>(n), 0.0);
    std::vector<double> slope(static_cast<std::size_t>(n), 0.0);
    std::vector<char> known(static_cast<std::size_t>(n), 0);
    offset[0] = 0.0;
    slope[0] = 1.0;
    known[0] = 1;

    std::deque<int> q{0};
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (const Edge& ed : model.edges) {
            if (ed.atoms.empty()) continue;
            const Atom& a = ed.atoms.front();
            if (ed.from == u && !known[static_cast<std::size_t>(ed.to)]) {
                // Gamma(to) = (Gamma(from) - xi)/rho
                offset[static_cast<std::size_t>(ed.to)] =
                    (offset[static_cast<std::size_t>(u)] - a.xi) / a.rho;
                slope[static_cast<std::size_t>(ed.to)] = slope[static_cast<std::size_t>(u)] / a.rho;
                known[static_cast<std::size_t>(ed.to)] = 1;
                q.push_back(ed.to);
            } else if (ed.to == u && !known[static_cast<std::size_t>(ed.from)]) {
                offset[static_cast<std::size_t>(ed.from)] =
                    a.xi + offset[static_cast<std::size_t>(u)] * a.rho;
                slope[static_cast<std::size_t>(ed.from)] = slope[static_cast<std::size_t>(u)] * a.rho;
                known[static_cast<std::size_t>(ed.from)] = 1;
                q.push_back(ed.from);
            }
        }
    }
    // strong connectivity makes the undirected constraint graph connected
    for (char k : known)
        if (!k) throw ComputationError("degeneracy propagation failed to reach all states");

    // closing constraints: c0 + cg * g = 0 per atom; pin g with the largest |cg|
    double best_cg = 0.0, best_c0 = 0.0;
    for (const Edge& ed : model.edges)
        for (const Atom& a : ed.atoms) {
            const double c0 = a.xi + offset[static_cast<std::size_t>(ed.to)] * a.rho -
                              offset[static_cast<std::size_t>(ed.from)];
            const double cg = slope[static_cast<std::size_t>(ed.to)] * a.rho -
                              slope[static_cast<std::size_t>(ed.from)];
            if (std::abs(cg) > std::abs(best_cg)) {
                best_cg = cg;
                best_c0 = c0;
            }
        }
    const double g = std::abs(best_cg) > 1e-300 ? -best_c0 / best_cg : 0.0;

    Degeneracy out;
    Vec gamma(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) gamma[static_cast<std::size_t>(i)] = offset[i] + slope[i] * g;
    for (const Edge& ed : model.edges)
        for (const Atom& a : ed.atoms) {
            const double resid = a.xi + gamma[static_cast<std::size_t>(ed.to)] * a.rho -
                                 gamma[static_cast<std::size_t>(ed.from)];
            if (std::abs(resid) > tol) return out; // degenerate = false
        }
    out.degenerate = true;
    out.gamma = std::move(gamma);
    return out;
}

namespace {

struct AugEdge {
    int from, to; // augmented node ids
    double q;     // log|rho|
};

std::vector<AugEdge> augmented_value_edges(const MmpModel& model) {
    std::vector<AugEdge> out;
    for (const Edge& ed : model.edges)
        for (const Atom& a : ed.atoms) {
            const double q = std::log(std::abs(a.rho));
            const int flip = a.rho < 0.0 ? 1 : 0;
            for (int layer = 0; layer < 2; ++layer)
                out.push_back({2 * ed.from + layer, 2 * ed.to + (layer ^ flip), q});
        }
    return out;
}

// gcd over the residual lattice, nearest-residue Euclid; remainders at or
// below cutoff count as zero, so incommensurable inputs drive the iterate
// into (cutoff, 2*cutoff] instead of stabilizing
double real_gcd(const std::vector<double>& values, double cutoff) {
    double g = 0.0;
    for (double v : values) {
        v = std::abs(v);
        if (v <= cutoff) continue;
        if (g == 0.0) {
            g = v;
            continue;
        }
        double a = std::max(g, v), b = std::min(g, v);
        while (true) {
            double r = std::fmod(a, b);
            r = std::min(r, b - r);
            if (r <= cutoff) break;
            a = b;
            b = r;
        }
        g = b;
    }
    return g;
}

} // namespace

ArithmeticCheck check_arithmetic(const MmpModel& model, double tol) {
    const int n = model.size();
    const auto edges = augmented_value_edges(model);
    const int nodes = 2 * n;

    // forward adjacency with values
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(nodes));
    for (const AugEdge& e : edges) adj[static_cast<std::size_t>(e.from)].push_back({e.to, e.q});

    // potentials d(v): sum of q along a directed tree path from the
    // component root; components are closed classes, so every node of a
    // component is reachable from its root
    std::vector<double> pot(static_cast<std::size_t>(nodes), 0.0);
    std::vector<int> comp(static_cast<std::size_t>(nodes), -1);
    int ncomp = 0;
    for (int root = 0; root < nodes; ++root) {
        if (comp[static_cast<std::size_t>(root)] >= 0) continue;
        comp[static_cast<std::size_t>(root)] = ncomp;
        pot[static_cast<std::size_t>(root)] = 0.0;
        std::deque<int> q{root};
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (const auto& [v, qval] : adj[static_cast<std::size_t>(u)])
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = ncomp;
                    pot[static_cast<std::size_t>(v)] = pot[static_cast<std::size_t>(u)] + qval;
                    q.push_back(v);
                }
        }
        ++ncomp;
    }

    // cycle residuals; edges never cross components (closed classes)
    std::vector<double> residuals;
    double max_resid = 0.0;
    for (const AugEdge& e : edges) {
        if (comp[static_cast<std::size_t>(e.from)] != comp[static_cast<std::size_t>(e.to)])
            throw ComputationError("augmented component structure is not closed");
        const double r = pot[static_cast<std::size_t>(e.from)] + e.q -
                         pot[static_cast<std::size_t>(e.to)];
        residuals.push_back(r);
        max_resid = std::max(max_resid, std::abs(r));
    }

    ArithmeticCheck out;
    out.shift.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    if (max_resid <= tol) {
        // every cycle sum vanishes; any alpha works
        out.arithmetic = true;
        out.degenerate_lattice = true;
        out.alpha = 0.0;
        for (int x = 0; x < n; ++x)
            for (int l = 0; l < 2; ++l)
                out.shift[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)] =
                    -pot[static_cast<std::size_t>(2 * x + l)];
        return out;
    }

    // decision bands: a span three decades above the cutoff is a lattice,
    // an iterate that bottomed out within one decade of the cutoff is a
    // decisive collapse, anything between is decided but flagged fragile
    const double g = real_gcd(residuals, tol);
    out.arithmetic = g > 1e3 * tol;
    out.fragile = g > 10.0 * tol && g <= 1e6 * tol;
    if (!out.arithmetic) return out;

    out.alpha = g;
    // beta(x, eta) = -d((x,eta)) reduced into [0, alpha)
    for (int x = 0; x < n; ++x)
        for (int l = 0; l < 2; ++l) {
            double b = std::fmod(-pot[static_cast<std::size_t>(2 * x + l)], g);
            if (b < 0.0) b += g;
            out.shift[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)] = b;
        }
    return out;
}

StructureReport analyze_structure(const MmpModel& model, double tol) {
    StructureReport out;
    out.period = period_and_classes(model);
    out.condition_g = check_condition_g(model);
    out.degeneracy = check_degeneracy(model, tol);
    out.arithmetic = check_arithmetic(model, tol);
    return out;
}

} // namespace mmtail
