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

#include <stdexcept>
#include <string>

namespace mmtail {

// Input data fails the model contract (bad JSON, failed validation).
struct InvalidModel : std::runtime_error {
    explicit InvalidModel(const std::string& what) : std::runtime_error(what) {}
};

// A standing assumption of the method is violated by the model
// (no root of the growth exponent, nonpositive tilted drift, ...).
struct AssumptionError : std::runtime_error {
    explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical procedure failed to converge within its iteration cap.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Runtime sanity check tripped while processing otherwise valid input
// (suspected divergence, degenerate estimator input, ...).
struct ComputationError : std::runtime_error {
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mmtail
