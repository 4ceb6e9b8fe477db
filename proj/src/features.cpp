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

#include "phaseforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "passes/pass_util.hpp"
#include "phaseforge/cfg.hpp"
#include "phaseforge/cost_model.hpp"

namespace phaseforge {

std::string_view state_mode_name(StateMode m) {
  switch (m) {
    case StateMode::kFeatures:
      return "features";
    case StateMode::kHistogram:
      return "histogram";
    case StateMode::kBoth:
      return "both";
  }
  return "both";
}

StateMode parse_state_mode(std::string_view name) {
  if (name == "features") return StateMode::kFeatures;
  if (name == "histogram") return StateMode::kHistogram;
  if (name == "both") return StateMode::kBoth;
  throw std::invalid_argument("unknown state mode '" + std::string(name) + "'");
}

FeatureVector extract_features(const Program& p) {
  const Function& fn = p.main();
  const CfgInfo cfg(fn);
  FeatureVector f{};

  std::int64_t total = 0;
  for_each_instruction(fn, [&](const Instruction& i) {
    ++f[static_cast<std::size_t>(i.op)];
    ++total;
    if (i.result) ++f[35];
    i.for_each_value_operand([&](const Value& v) {
      if (v.is_const()) ++f[36];
      if (v.is_reg()) ++f[37];
    });
    if (is_binary(i.op)) {
      const bool l = i.operands[0].is_const();
      const bool r = i.operands[1].is_const();
      if (l || r) ++f[40];
      if (l && r) ++f[41];
    }
    if (i.op == Opcode::kPhi) f[45] += static_cast<std::int64_t>(i.num_incoming());
    if (i.op == Opcode::kBr && i.operands[0].is_const()) ++f[48];
  });
  f[20] = total;

  const std::size_t n = fn.blocks.size();
  f[21] = static_cast<std::int64_t>(n);
  f[22] = static_cast<std::int64_t>(cfg.edges().size());
  std::int64_t largest = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const BasicBlock& blk = fn.blocks[b];
    const std::size_t np = cfg.preds(b).size();
    ++f[np == 0 ? 23 : np == 1 ? 24 : np == 2 ? 25 : 26];
    const std::size_t ns = cfg.succs(b).size();
    ++f[27 + std::min<std::size_t>(ns, 2)];
    const auto size = static_cast<std::int64_t>(blk.size());
    largest = std::max(largest, size);
    if (size <= 5) ++f[33];
    if (size >= 15) ++f[34];
    if (cfg.loop_depth(b) >= 1) f[44] += size;
    if (!blk.phis.empty()) ++f[46];
    f[53] += static_cast<std::int64_t>(critical_path(blk));
    if (blk.terminator.op == Opcode::kRet) ++f[54];
    const auto succ = cfg.succs(b);
    if (std::find(succ.begin(), succ.end(), b) != succ.end()) ++f[55];
  }
  f[30] = static_cast<std::int64_t>(cfg.critical_edges().size());
  f[31] = largest;
  f[32] = n == 0 ? 0 : total / static_cast<std::int64_t>(n);

  f[38] = f[13] + f[14] + f[15] + f[16];
  for (std::size_t k = 0; k <= 9; ++k) f[39] += f[k];
  f[42] = static_cast<std::int64_t>(cfg.back_edges().size());
  f[43] = static_cast<std::int64_t>(cfg.max_loop_depth());
  f[47] = static_cast<std::int64_t>(detail::count_dead(fn));
  f[49] = static_cast<std::int64_t>(detail::count_cse_candidates(fn));

  const std::set<std::string> slots = detail::non_escaping_allocas(fn);
  f[52] = static_cast<std::int64_t>(slots.size());
  for_each_instruction(fn, [&](const Instruction& i) {
    if (i.op == Opcode::kLoad && i.operands[0].is_reg() &&
        slots.count(i.operands[0].name)) {
      ++f[50];
    }
    if (i.op == Opcode::kStore && i.operands[1].is_reg() &&
        slots.count(i.operands[1].name)) {
      ++f[51];
    }
  });
  return f;
}

ActionHistogram histogram_state(std::span<const PassId> actions) {
  ActionHistogram h{};
  for (PassId a : actions) ++h[index_of(a)];
  return h;
}

StateVector normalize_state(const FeatureVector& f, const ActionHistogram& h,
                            int steps_left, int horizon, StateMode mode) {
  StateVector s(kStateSize, 0.0);
  if (mode != StateMode::kHistogram) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      s[i] = std::log2(1.0 + static_cast<double>(f[i]));
    }
  }
  if (mode != StateMode::kFeatures) {
    for (std::size_t i = 0; i < kNumPasses; ++i) {
      s[kNumFeatures + i] =
          static_cast<double>(h[i]) / static_cast<double>(horizon);
    }
  }
  s[kStateSize - 1] =
      static_cast<double>(steps_left) / static_cast<double>(horizon);
  return s;
}

}  // namespace phaseforge
