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

#include "model.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mmtail {

namespace {
constexpr double kSumTol = 1e-12;
}

const Edge& MmpModel::edge_at(int i, int j) const {
    const int idx = edge_index(i, j);
    if (idx < 0) throw InvalidModel("no coefficient law on zero-probability edge (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    return edges[static_cast<std::size_t>(idx)];
}

void MmpModel::rebuild_lookup() {
    const std::size_t s = states.size();
    edge_lookup.assign(s * s, -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& ed = edges[e];
        if (ed.from >= 0 && ed.to >= 0 && ed.from < static_cast<int>(s) &&
            ed.to < static_cast<int>(s) && ed.prob > 0.0)
            edge_lookup[static_cast<std::size_t>(ed.from) * s + ed.to] = static_cast<int>(e);
    }
}

MmpModel make_model(std::vector<std::string> states, Mat transition,
                    std::vector<Edge> edges, double c_xi, double c_rho) {
    MmpModel m;
    m.states = std::move(states);
    m.transition = std::move(transition);
    m.edges = std::move(edges);
    m.c_xi = c_xi;
    m.c_rho = c_rho;
    m.rebuild_lookup();
    return m;
}

namespace {

// strong connectivity of the positive-transition digraph via two BFS passes
bool strongly_connected(const MmpModel& m) {
    const int n = m.size();
    auto reach = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                const double p = forward ? m.transition.at(u, v) : m.transition.at(v, u);
                if (p > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reach(true) && reach(false);
}

} // namespace

ValidationReport validate(const MmpModel& model) {
    ValidationReport out;
    const int n = model.size();
    auto add = [&out](std::string rule, std::string detail, int row = -1, int from = -1,
                      int to = -1, int atom = -1) {
        out.push_back({std::move(rule), std::move(detail), row, from, to, atom});
    };

    if (n < 1) {
        add("shape", "model has no states");
        return out;
    }
    if (model.transition.n != n) {
        add("shape", "transition matrix size does not match state count");
        return out;
    }
    if (!(model.c_xi > 0.0)) add("bounds", "c_xi must be positive");
    if (!(model.c_rho > 1.0)) add("bounds", "c_rho must exceed 1");

    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p = model.transition.at(i, j);
            if (p < 0.0 || p > 1.0)
                add("probability", "H[" + std::to_string(i) + "][" + std::to_string(j) +
                                       "] outside [0,1]", i, i, j);
            s += p;
        }
        if (std::abs(s - 1.0) > kSumTol)
            add("row sum", "row " + std::to_string(i) + " sums to " + std::to_string(s), i);
    }

    std::vector<char> have_edge(static_cast<std::size_t>(n) * n, 0);
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& ed = model.edges[e];
        if (ed.from < 0 || ed.from >= n || ed.to < 0 || ed.to >= n) {
            add("shape", "edge endpoint out of range", -1, ed.from, ed.to);
            continue;
        }
        const std::size_t key = static_cast<std::size_t>(ed.from) * n + ed.to;
        if (have_edge[key]) add("shape", "duplicate edge", -1, ed.from, ed.to);
        have_edge[key] = 1;
        const double p = model.transition.at(ed.from, ed.to);
        if (p <= 0.0) {
            add("zero-probability edge", "edge carries a coefficient law but H entry is 0",
                -1, ed.from, ed.to);
            continue;
        }
        if (ed.atoms.empty()) {
            add("atom weights", "edge has no atoms", -1, ed.from, ed.to);
            continue;
        }
        double ws = 0.0;
        for (std::size_t k = 0; k < ed.atoms.size(); ++k) {
            const Atom& a = ed.atoms[k];
            if (!(a.w > 0.0))
                add("atom weights", "atom weight not positive", -1, ed.from, ed.to,
                    static_cast<int>(k));
            ws += a.w;
            if (!(std::abs(a.xi) < model.c_xi))
                add("ellipticity", "|xi| >= c_xi", -1, ed.from, ed.to, static_cast<int>(k));
            const double ar = std::abs(a.rho);
            if (!(ar > 1.0 / model.c_rho && ar < model.c_rho))
                add("ellipticity", "|rho| outside (1/c_rho, c_rho)", -1, ed.from, ed.to,
                    static_cast<int>(k));
        }
        if (std::abs(ws - 1.0) > kSumTol)
            add("atom weights", "edge (" + std::to_string(ed.from) + "," + std::to_string(ed.to) +
                                    ") weights sum to " + std::to_string(ws),
                -1, ed.from, ed.to);
    }

    // every positive H entry must carry a law
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (model.transition.at(i, j) > 0.0 && !have_edge[static_cast<std::size_t>(i) * n + j])
                add("missing law", "positive transition without coefficient atoms", -1, i, j);

    if (out.empty() && !strongly_connected(model))
        add("irreducibility", "positive-transition digraph is not strongly connected");

    return out;
}

void require_valid(const MmpModel& model) {
    const ValidationReport rep = validate(model);
    if (rep.empty()) return;
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& v : rep) os << " [" << v.rule << "] " << v.detail << ";";
    throw InvalidModel(os.str());
}

Vec stationary_distribution(const MmpModel& model, double tol) {
    Vec pi = stationary_left(model.transition, tol);
    Vec r = vecmat(pi, model.transition);
    double res = 0.0;
    for (int i = 0; i < model.size(); ++i) res = std::max(res, std::abs(r[i] - pi[i]));
    if (res > tol) throw NonConvergence("stationary distribution residual " + std::to_string(res));
    for (double x : pi)
        if (!(x > 0.0)) throw NonConvergence("stationary distribution has a nonpositive entry");
    return pi;
}

PathTables::PathTables(const MmpModel& model) : n_(model.size()) {
    rows_.resize(static_cast<std::size_t>(n_));
    laws_.resize(model.edges.size());
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& ed = model.edges[e];
        EdgeLaw& law = laws_[e];
        law.atoms = ed.atoms;
        law.cum.resize(ed.atoms.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < ed.atoms.size(); ++k) {
            acc += ed.atoms[k].w;
            law.cum[k] = acc;
        }
        law.cum.back() = 1.0;

        Row& row = rows_[static_cast<std::size_t>(ed.from)];
        row.to.push_back(ed.to);
        row.edge.push_back(static_cast<int>(e));
        row.cum.push_back(ed.prob); // partial; prefix-summed below
    }
    for (auto& row : rows_) {
        double acc = 0.0;
        for (auto& c : row.cum) {
            acc += c;
            c = acc;
        }
        if (!row.cum.empty()) row.cum.back() = 1.0;
    }
}

PathTables::Step PathTables::step(int state, Rng& rng) const {
    const Row& row = rows_[static_cast<std::size_t>(state)];
    const double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < row.cum.size() && u >= row.cum[i]) ++i;
    const EdgeLaw& law = laws_[static_cast<std::size_t>(row.edge[i])];
    const double v = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < law.cum.size() && v >= law.cum[k]) ++k;
    return {row.to[i], law.atoms[k].xi, law.atoms[k].rho};
}

PathSample sample_path(const MmpModel& model, int initial_state, long n, Rng& rng) {
    PathTables tables(model);
    PathSample out;
    out.states.reserve(static_cast<std::size_t>(n) + 1);
    out.coeffs.reserve(static_cast<std::size_t>(n));
    out.states.push_back(initial_state);
    int x = initial_state;
    for (long k = 0; k < n; ++k) {
        const auto s = tables.step(x, rng);
        x = s.next_state;
        out.states.push_back(x);
        out.coeffs.emplace_back(s.xi, s.rho);
    }
    return out;
}

double mean_log_abs_rho(const MmpModel& model, const Vec& pi) {
    double acc = 0.0;
    for (const Edge& ed : model.edges) {
        double inner = 0.0;
        for (const Atom& a : ed.atoms) inner += a.w * std::log(std::abs(a.rho));
        acc += pi[static_cast<std::size_t>(ed.from)] * ed.prob * inner;
    }
    return acc;
}

} // namespace mmtail
