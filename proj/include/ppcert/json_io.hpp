// Copyright 2026 The ppcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPCERT_JSON_IO_HPP_
#define PPCERT_JSON_IO_HPP_

#include <string>

#include <json.hpp>

#include "ppcert/beliefs.hpp"
#include "ppcert/certify.hpp"
#include "ppcert/mechanisms.hpp"
#include "ppcert/scores.hpp"

namespace ppcert {

using Json = nlohmann::json;

// --- Parsing (throws ParseError with field diagnostics) ---

// Universe entries are strings, numbers, or equal-length numeric tuples.
Universe parse_universe(const Json& j);
FiniteBelief parse_finite_belief(const Json& j);
GaussianBelief parse_gaussian_belief(const Json& j);
// {"kind":"finite"|"gaussian", ...}
std::variant<FiniteBelief, GaussianBelief> parse_belief(const Json& j);
// {"universe":..,"alphabet":..,"kernel":[[..]]} with optional
// "input_alphabet" for second-stage rows; {"kind":"average"} selects the
// noiseless-average mechanism.
AnyMechanism parse_any_mechanism(const Json& j);
FiniteMechanism parse_mechanism(const Json& j);
// [["a","b"], ...] or {"pairs": [...]}.
NeighborRelation parse_neighbors(const Json& j);
// {"rule":"interval","s":..} | {"rule":"neglogprob"} | {"rule":"dss","i":..}
ScoringRule parse_rule(const Json& j);
// {"decisions":[..],"universe":[..],"rho":[[..]]} with rows keyed by
// decision and columns by dataset; entries may be the string "inf".
PrivacyFunction parse_privacy_function(const Json& j);
// {"scores":[..],"prior_class":{..},"kappa":..,"delta":..}; "exp_kappa":
// [num,den] supplies the exact value of e^kappa when kappa = log(num/den).
GuaranteeSpec parse_guarantee(const Json& j);

// Accepts inline JSON (first non-space character '{' or '[') or a file path.
Json load_json_argument(const std::string& arg);

// --- Serialization ---

Json to_json(const FiniteBelief& belief);
Json to_json(const GaussianBelief& belief);
Json to_json(const PrivacyFunction& rho);
Json to_json(const FiniteMechanism& mech);
Json to_json(const NeighborRelation& neighbors);
Json to_json(const ScoringRule& rule);
Json to_json(const Witness& witness);
Json to_json(const CertificationReport& report);
Json to_json(const PdpReport& report);
Json to_json(const EquivalenceReport& report);
Json to_json(const CompositionReport& report);
Json to_json(const RecPostReport& report);
Json to_json(const AverageBoundReport& report);
Json to_json(const SenderPostWitness& witness);

// Serializes with doubles rendered at 17 significant digits (lossless
// round-trip); non-finite numbers render as null. Deterministic: keys are
// emitted in sorted order.
std::string dump_json_17(const Json& j, int indent = 2);

// One CSV line per evaluation row; fields with commas or quotes are quoted.
std::string rows_to_csv(const std::vector<EvalRow>& rows);

// Writes via a temp file in the same directory followed by a rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace ppcert

#endif  // PPCERT_JSON_IO_HPP_
