// Shared model fixtures for the test suites.
//
// model_a:  one state, atoms (xi=1, rho=2, w=1/3), (xi=1, rho=1/2, w=2/3).
//           E log rho = -(1/3) log 2 < 0; kappa = 1 (root of u/3 + 2/(3u) = 1
//           in u = 2^kappa); lattice span alpha = log 2.
// model_ap: model_a with rho = 2 replaced by rho = -2 (Condition G holds).
// model_b:  two states, H = [[0.9, 0.1], [0.1, 0.9]], every edge into state 0
//           carries (xi=1, rho=1.5), into state 1 (xi=1, rho=0.5).
// model_c:  contractive variant of model_b (rho 0.9 / 0.5); E_x R solves
//           m(x) = E_x[xi0] + E_x[rho0 m(x0)], giving m = (6, 2.8).
// model_d:  model_a with xi = 3(1 - rho) per atom: degenerate, R == 3
//           (bounds widened to c_xi = 4 so the fixture validates).
#pragma once

#include "model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fixtures {

inline mmtail::MmpModel model_a() {
    mmtail::Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<mmtail::Edge> edges{{0, 0, 1.0, {{1.0, 2.0, 1.0 / 3.0}, {1.0, 0.5, 2.0 / 3.0}}}};
    return mmtail::make_model({"s0"}, h, edges, 2.0, 4.0);
}

inline mmtail::MmpModel model_a_prime() {
    mmtail::Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<mmtail::Edge> edges{{0, 0, 1.0, {{1.0, -2.0, 1.0 / 3.0}, {1.0, 0.5, 2.0 / 3.0}}}};
    return mmtail::make_model({"s0"}, h, edges, 2.0, 4.0);
}

// model_a with the second atom's rho replaced, for lattice experiments
inline mmtail::MmpModel model_a_rho(double rho2) {
    mmtail::Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<mmtail::Edge> edges{{0, 0, 1.0, {{1.0, 2.0, 1.0 / 3.0}, {1.0, rho2, 2.0 / 3.0}}}};
    return mmtail::make_model({"s0"}, h, edges, 2.0, 4.0);
}

inline mmtail::MmpModel model_b() {
    mmtail::Mat h(2);
    h.at(0, 0) = 0.9;
    h.at(0, 1) = 0.1;
    h.at(1, 0) = 0.1;
    h.at(1, 1) = 0.9;
    std::vector<mmtail::Edge> edges{
        {0, 0, 0.9, {{1.0, 1.5, 1.0}}},
        {0, 1, 0.1, {{1.0, 0.5, 1.0}}},
        {1, 0, 0.1, {{1.0, 1.5, 1.0}}},
        {1, 1, 0.9, {{1.0, 0.5, 1.0}}},
    };
    return mmtail::make_model({"s0", "s1"}, h, edges, 2.0, 4.0);
}

inline mmtail::MmpModel model_c() {
    mmtail::Mat h(2);
    h.at(0, 0) = 0.9;
    h.at(0, 1) = 0.1;
    h.at(1, 0) = 0.1;
    h.at(1, 1) = 0.9;
    std::vector<mmtail::Edge> edges{
        {0, 0, 0.9, {{1.0, 0.9, 1.0}}},
        {0, 1, 0.1, {{1.0, 0.5, 1.0}}},
        {1, 0, 0.1, {{1.0, 0.9, 1.0}}},
        {1, 1, 0.9, {{1.0, 0.5, 1.0}}},
    };
    return mmtail::make_model({"s0", "s1"}, h, edges, 2.0, 4.0);
}

inline mmtail::MmpModel model_d() {
    mmtail::Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<mmtail::Edge> edges{{0, 0, 1.0, {{-3.0, 2.0, 1.0 / 3.0}, {1.5, 0.5, 2.0 / 3.0}}}};
    return mmtail::make_model({"s0"}, h, edges, 4.0, 4.0);
}

inline std::string model_a_json() {
    return R"({
  "states": ["s0"],
  "c_xi": 2.0,
  "c_rho": 4.0,
  "transitions": [
    {"from": 0, "to": 0, "prob": 1.0,
     "atoms": [{"xi": 1.0, "rho": 2.0, "w": 0.3333333333333333},
               {"xi": 1.0, "rho": 0.5, "w": 0.6666666666666667}]}
  ]
})";
}

inline std::string model_d_json() {
    return R"({
  "states": ["s0"],
  "c_xi": 4.0,
  "c_rho": 4.0,
  "transitions": [
    {"from": 0, "to": 0, "prob": 1.0,
     "atoms": [{"xi": -3.0, "rho": 2.0, "w": 0.3333333333333333},
               {"xi": 1.5, "rho": 0.5, "w": 0.6666666666666667}]}
  ]
})";
}

// single state, single atom rho = c: Lambda(beta) = beta log c is monotone,
// no positive root when c < 1
inline mmtail::MmpModel model_single_atom(double xi, double rho) {
    mmtail::Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<mmtail::Edge> edges{{0, 0, 1.0, {{xi, rho, 1.0}}}};
    return mmtail::make_model({"s0"}, h, edges, std::abs(xi) + 1.0, 4.0);
}

} // namespace fixtures
