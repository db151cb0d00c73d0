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
#include "rng.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mmtail {

// One atom of the joint conditional law of (xi, rho) on a transition edge.
struct Atom {
    double xi = 0.0;
    double rho = 0.0;
    double w = 0.0;
};

struct Edge {
    int from = 0;
    int to = 0;
    double prob = 0.0;
    std::vector<Atom> atoms;
};

// Finite-state Markov chain plus a per-edge coefficient law for (xi, rho).
// Immutable after validation; safe to share across threads.
struct MmpModel {
    std::vector<std::string> states;
    Mat transition;               // S x S, row-stochastic
    std::vector<Edge> edges;      // one entry per positive-probability edge
    double c_xi = 0.0;            // |xi| < c_xi a.s.
    double c_rho = 0.0;           // 1/c_rho < |rho| < c_rho a.s.

    int size() const { return static_cast<int>(states.size()); }
    // index into edges, or -1 when transition(i,j) == 0
    int edge_index(int i, int j) const { return edge_lookup[static_cast<std::size_t>(i) * states.size() + j]; }
    const Edge& edge_at(int i, int j) const;

    // called by make_model(); fills edge_lookup from edges
    void rebuild_lookup();
    std::vector<int> edge_lookup;
};

// Assembles the lookup table; does not validate.
MmpModel make_model(std::vector<std::string> states, Mat transition,
                    std::vector<Edge> edges, double c_xi, double c_rho);

struct Violation {
    std::string rule;     // "row sum", "atom weights", "ellipticity", ...
    std::string detail;
    int row = -1;         // state index, where applicable
    int from = -1, to = -1, atom = -1;
};

using ValidationReport = std::vector<Violation>;

// Every violated invariant with its location; empty report means valid.
ValidationReport validate(const MmpModel& model);

// Throws InvalidModel with a joined message unless validate() is empty.
void require_valid(const MmpModel& model);

// Unique stationary distribution pi of the transition matrix
// (pi H = pi, sum pi = 1, entries > 0), residual below tol in sup-norm.
Vec stationary_distribution(const MmpModel& model, double tol = 1e-12);

// One sampled trajectory: states x_{-1}, x_0, ..., x_{n-1} and the n
// coefficient pairs (xi_k, rho_k) drawn from the traversed edges' laws.
struct PathSample {
    std::vector<int> states;                          // n + 1 entries
    std::vector<std::pair<double, double>> coeffs;    // n entries (xi, rho)
};

// Precomputed cumulative tables for edge/atom sampling along paths.
class PathTables {
public:
    explicit PathTables(const MmpModel& model);

    // draw x_k ~ H(x_{k-1}, .) and (xi, rho) from that edge's atom law
    struct Step {
        int next_state;
        double xi, rho;
    };
    Step step(int state, Rng& rng) const;

    int size() const { return n_; }

private:
    struct Row {
        std::vector<double> cum;
        std::vector<int> to;
        std::vector<int> edge;
    };
    struct EdgeLaw {
        std::vector<double> cum;
        std::vector<Atom> atoms;
    };
    int n_;
    std::vector<Row> rows_;
    std::vector<EdgeLaw> laws_;
};

PathSample sample_path(const MmpModel& model, int initial_state, long n, Rng& rng);

// E_pi log|rho|: the contraction rate of the driving products, computed
// exactly from the atom laws and the stationary distribution.
double mean_log_abs_rho(const MmpModel& model, const Vec& pi);

} // namespace mmtail
