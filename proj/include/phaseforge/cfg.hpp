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

// Control-flow analyses: predecessor/successor lists, dominators, natural
// loops and loop nesting depth.

#ifndef PHASEFORGE_CFG_HPP_
#define PHASEFORGE_CFG_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "phaseforge/ir.hpp"

namespace phaseforge {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct NaturalLoop {
  std::size_t header = 0;
  std::vector<std::size_t> latches;  // sources of back edges into header
  std::vector<std::size_t> blocks;   // sorted, includes header

  bool contains(std::size_t b) const;
};

// All block references are indices into Function::blocks. Unreachable blocks
// have no dominators and loop depth 0.
class CfgInfo {
 public:
  explicit CfgInfo(const Function& fn);

  std::size_t size() const { return succs_.size(); }
  const std::vector<std::size_t>& preds(std::size_t b) const { return preds_[b]; }
  const std::vector<std::size_t>& succs(std::size_t b) const { return succs_[b]; }
  bool reachable(std::size_t b) const { return reachable_[b]; }

  // Reflexive dominance; false whenever either block is unreachable.
  bool dominates(std::size_t a, std::size_t b) const;
  // Immediate dominator; entry and unreachable blocks map to themselves.
  std::size_t idom(std::size_t b) const { return idom_[b]; }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Edge>& back_edges() const { return back_edges_; }
  const std::vector<Edge>& critical_edges() const { return critical_edges_; }
  const std::vector<NaturalLoop>& loops() const { return loops_; }
  std::size_t loop_depth(std::size_t b) const { return loop_depth_[b]; }
  std::size_t max_loop_depth() const;

  // Reverse post-order over reachable blocks.
  const std::vector<std::size_t>& rpo() const { return rpo_; }

 private:
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<bool> reachable_;
  std::vector<std::vector<bool>> dom_;  // dom_[b][a]: a dominates b
  std::vector<std::size_t> idom_;
  std::vector<Edge> edges_;
  std::vector<Edge> back_edges_;
  std::vector<Edge> critical_edges_;
  std::vector<NaturalLoop> loops_;
  std::vector<std::size_t> loop_depth_;
  std::vector<std::size_t> rpo_;
};

CfgInfo analyze_cfg(const Program& p);

}  // namespace phaseforge

#endif  // PHASEFORGE_CFG_HPP_
