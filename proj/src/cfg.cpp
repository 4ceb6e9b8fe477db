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

#include "phaseforge/cfg.hpp"

#include <algorithm>
#include <iterator>

namespace phaseforge {

bool NaturalLoop::contains(std::size_t b) const {
  return std::binary_search(blocks.begin(), blocks.end(), b);
}

CfgInfo::CfgInfo(const Function& fn) {
  const std::size_t n = fn.blocks.size();
  preds_.assign(n, {});
  succs_.assign(n, {});
  for (std::size_t b = 0; b < n; ++b) {
    for (const std::string& s : fn.blocks[b].successors()) {
      auto t = fn.block_index(s);
      if (!t) continue;  // dangling target; the verifier reports it
      succs_[b].push_back(*t);
      preds_[*t].push_back(b);
      edges_.push_back({b, *t});
    }
  }

  // Reachability and post-order by iterative DFS.
  reachable_.assign(n, false);
  std::vector<std::size_t> post;
  if (n > 0) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    reachable_[0] = true;
    while (!stack.empty()) {
      auto& [b, next] = stack.back();
      if (next < succs_[b].size()) {
        std::size_t s = succs_[b][next++];
        if (!reachable_[s]) {
          reachable_[s] = true;
          stack.push_back({s, 0});
        }
      } else {
        post.push_back(b);
        stack.pop_back();
      }
    }
  }
  rpo_.assign(post.rbegin(), post.rend());

  // Dominator sets: iterate dom(b) = {b} ∪ ⋂ dom(preds) to a fixpoint.
  dom_.assign(n, std::vector<bool>(n, true));
  for (std::size_t b = 0; b < n; ++b) {
    if (!reachable_[b]) dom_[b].assign(n, false);
  }
  if (n > 0) {
    dom_[0].assign(n, false);
    dom_[0][0] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t b : rpo_) {
      if (b == 0) continue;
      std::vector<bool> next(n, true);
      for (std::size_t p : preds_[b]) {
        if (!reachable_[p]) continue;
        for (std::size_t a = 0; a < n; ++a) next[a] = next[a] && dom_[p][a];
      }
      next[b] = true;
      if (next != dom_[b]) {
        dom_[b] = std::move(next);
        changed = true;
      }
    }
  }

  // The immediate dominator is the strict dominator dominated by all others.
  idom_.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    idom_[b] = b;
    if (!reachable_[b] || b == 0) continue;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == b || !dom_[b][a]) continue;
      bool is_idom = true;
      for (std::size_t c = 0; c < n && is_idom; ++c) {
        if (c != b && c != a && dom_[b][c] && !dom_[a][c]) is_idom = false;
      }
      if (is_idom) {
        idom_[b] = a;
        break;
      }
    }
  }

  for (const Edge& e : edges_) {
    if (reachable_[e.from] && dominates(e.to, e.from)) {
      back_edges_.push_back(e);
    }
    if (succs_[e.from].size() > 1 && preds_[e.to].size() > 1) {
      critical_edges_.push_back(e);
    }
  }

  // Natural loops, one per header (back edges into the same header merge).
  for (const Edge& be : back_edges_) {
    auto it = std::find_if(loops_.begin(), loops_.end(), [&](const auto& l) {
      return l.header == be.to;
    });
    if (it == loops_.end()) {
      loops_.push_back({be.to, {}, {be.to}});
      it = std::prev(loops_.end());
    }
    it->latches.push_back(be.from);
    std::vector<bool> in(n, false);
    for (std::size_t b : it->blocks) in[b] = true;
    std::vector<std::size_t> work;
    if (!in[be.from]) {
      in[be.from] = true;
      work.push_back(be.from);
    }
    while (!work.empty()) {
      std::size_t b = work.back();
      work.pop_back();
      for (std::size_t p : preds_[b]) {
        if (!in[p] && reachable_[p]) {
          in[p] = true;
          work.push_back(p);
        }
      }
    }
    it->blocks.clear();
    for (std::size_t b = 0; b < n; ++b) {
      if (in[b]) it->blocks.push_back(b);
    }
  }

  loop_depth_.assign(n, 0);
  for (const NaturalLoop& l : loops_) {
    for (std::size_t b : l.blocks) ++loop_depth_[b];
  }
}

bool CfgInfo::dominates(std::size_t a, std::size_t b) const {
  return reachable_[a] && reachable_[b] && dom_[b][a];
}

std::size_t CfgInfo::max_loop_depth() const {
  std::size_t m = 0;
  for (std::size_t d : loop_depth_) m = std::max(m, d);
  return m;
}

CfgInfo analyze_cfg(const Program& p) { return CfgInfo(p.main()); }

}  // namespace phaseforge
