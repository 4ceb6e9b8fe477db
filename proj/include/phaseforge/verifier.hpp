// Copyright 2026 The PhaseForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHASEFORGE_VERIFIER_HPP_
#define PHASEFORGE_VERIFIER_HPP_

#include <string>
#include <vector>

#include "phaseforge/ir.hpp"

namespace phaseforge {

// Returns every rule violation found; an empty list means the program is
// well formed. Never throws.
std::vector<std::string> validate(const Program& p);

inline bool is_valid(const Program& p) { return validate(p).empty(); }

}  // namespace phaseforge

#endif  // PHASEFORGE_VERIFIER_HPP_
