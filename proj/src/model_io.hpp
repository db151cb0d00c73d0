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

#include "model.hpp"
#include "montecarlo.hpp"
#include "spectral.hpp"
#include "structure.hpp"
#include "tails.hpp"

#include <string>

namespace mmtail {

// Model file schema: {"states": [..], "transitions": [{"from","to","prob",
// "atoms":[{"xi","rho","w"}]}], "c_xi", "c_rho"}; indices are 0-based
// positions in "states". Throws InvalidModel on malformed input.
MmpModel model_from_json(const std::string& text);
std::string model_to_json(const MmpModel& model);

std::string validation_report_to_json(const ValidationReport& report);
std::string spectral_to_json(const SpectralAnalysis& sp);
std::string structure_to_json(const StructureReport& st);
std::string tail_report_to_json(const TailReport& tr);

// Sample table, the CSV compatibility contract:
// header state,index,R,xi0,rho0,terms; %.17g floats; LF line endings.
std::string batch_to_csv(const SampleBatch& batch);
SampleBatch batch_from_csv(const std::string& text);

} // namespace mmtail
