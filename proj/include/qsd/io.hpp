// Copyright 2026 The qsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "qsd/discrim.hpp"
#include "qsd/estimate.hpp"
#include "qsd/gram.hpp"
#include "qsd/rewards.hpp"
#include "qsd/states.hpp"

// Structured-text (JSON) forms of the data types.
//
//   gram:     {"size": N, "entries": [[re, im], ...]}            row-major
//   reward:   {"guesses": L, "states": N, "values": [...], "mask": [0/1, ...]}
//   ensemble: {"dim": d, "states": [[[re, im], ...], ...], "priors": [...]}
//
// Readers throw InvalidArgument on malformed input.

namespace qsd {

std::string to_json(const GramMatrix& g);
GramMatrix gram_from_json(const std::string& text);

std::string to_json(const RewardMatrix& r);
RewardMatrix reward_from_json(const std::string& text);

std::string to_json(const StateEnsemble& e);
StateEnsemble ensemble_from_json(const std::string& text);

std::string to_json(const EstimatedGram& e);
std::string to_json(const SolveReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qsd
