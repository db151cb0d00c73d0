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

#include <array>
#include <vector>

namespace mmtail {

struct PeriodClasses {
    int period = 1;
    std::vector<std::vector<int>> classes; // partition of states; H maps class i into class i+1 mod d
};

PeriodClasses period_and_classes(const MmpModel& model);

// Sign-irreducibility check on the augmented chain over S x {-1,+1}.
//
// Node (x, g) steps to (y, g*sign(rho)) for every positive-probability atom
// on edge (x, y). Condition G holds iff that graph is strongly connected.
// When it is not, the reachable set of (state 0, +1) contains exactly one
// signed copy of each state and induces the witness partition (A1, A-1):
// positive-rho edges stay inside a class, negative-rho edges cross.
struct ConditionG {
    bool holds = false;
    std::vector<int> a1;     // states in A_1 (empty when holds)
    std::vector<int> a_neg1; // states in A_{-1}
    int components = 1;      // closed communicating classes of the augmented graph
};

ConditionG check_condition_g(const MmpModel& model);

// Degeneracy criterion: does a per-state Gamma exist with
// xi + Gamma(to) * rho == Gamma(from) for every positive-probability atom?
// When it does, R == Gamma(x_{-1}) almost surely and the tails vanish.
struct Degeneracy {
    bool degenerate = false;
    Vec gamma; // filled iff degenerate
};

Degeneracy check_degeneracy(const MmpModel& model, double tol = 1e-9);

// Lattice (arithmetic) check on the sign-augmented graph: log|rho| lies in
// beta(from,eta) - beta(to,eta*sign(rho)) + alpha Z iff every directed cycle
// sum of log|rho| lies in alpha Z; the shifts are tree potentials. Decided
// by an approximate real gcd of the cycle residuals with cutoff tol.
struct ArithmeticCheck {
    bool arithmetic = false;
    double alpha = 0.0;            // lattice span; 0 under the degenerate-lattice convention
    bool degenerate_lattice = false; // all residuals vanish, alpha unconstrained
    bool fragile = false;          // verdict decided within three decades of the cutoff
    // shift beta(x, eta) reduced into [0, alpha); indexed [x][eta], eta 0 => +1, 1 => -1
    std::vector<std::array<double, 2>> shift;
};

ArithmeticCheck check_arithmetic(const MmpModel& model, double tol = 1e-9);

struct StructureReport {
    PeriodClasses period;
    ConditionG condition_g;
    Degeneracy degeneracy;
    ArithmeticCheck arithmetic;
};

StructureReport analyze_structure(const MmpModel& model, double tol = 1e-9);

} // namespace mmtail
