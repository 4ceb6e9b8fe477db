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

#include "phaseforge/passes.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace phaseforge {
namespace {

constexpr std::array<std::string_view, kNumPasses> kPassNames = {
    "constprop",   "constfold",  "dce",         "cse",
    "mem2reg",     "licm",       "unroll2",     "instcombine",
    "branchfold",  "simplifycfg", "copyprop",   "reassoc"};

using PassFn = bool (*)(Function&);
constexpr std::array<PassFn, kNumPasses> kPassFns = {
    passes::constprop,   passes::constfold,   passes::dce,
    passes::cse,         passes::mem2reg,     passes::licm,
    passes::unroll2,     passes::instcombine, passes::branchfold,
    passes::simplifycfg, passes::copyprop,    passes::reassoc};

}  // namespace

std::optional<PassId> pass_from_index(long index) {
  if (index < 0 || index >= static_cast<long>(kNumPasses)) return std::nullopt;
  return static_cast<PassId>(index);
}

std::string_view pass_name(PassId id) { return kPassNames[index_of(id)]; }

std::optional<PassId> pass_from_name(std::string_view name) {
  auto it = std::find(kPassNames.begin(), kPassNames.end(), name);
  if (it == kPassNames.end()) return std::nullopt;
  return static_cast<PassId>(it - kPassNames.begin());
}

const std::array<PassId, kNumPasses>& all_passes() {
  static const std::array<PassId, kNumPasses> ids = [] {
    std::array<PassId, kNumPasses> a{};
    for (std::size_t i = 0; i < kNumPasses; ++i) a[i] = static_cast<PassId>(i);
    return a;
  }();
  return ids;
}

PassSequence parse_sequence(std::string_view text) {
  PassSequence seq;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of(",-", start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
      item.remove_prefix(1);
    }
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
      item.remove_suffix(1);
    }
    if (!item.empty()) {
      long index = -1;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), index);
      std::optional<PassId> id;
      if (ec == std::errc() && ptr == item.data() + item.size()) {
        id = pass_from_index(index);
      } else {
        id = pass_from_name(item);
      }
      if (!id) throw std::invalid_argument("unknown pass '" + std::string(item) + "'");
      seq.push_back(*id);
    } else if (end < text.size()) {
      throw std::invalid_argument("empty element in pass list");
    }
    start = end + 1;
  }
  return seq;
}

std::string format_sequence(std::span<const PassId> seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(index_of(seq[i]));
  }
  return out;
}

Program apply_pass(PassId id, const Program& p) {
  Program out = p;
  kPassFns[index_of(id)](out.main());
  return out;
}

Program apply_sequence(std::span<const PassId> seq, const Program& p) {
  Program out = p;
  for (PassId id : seq) kPassFns[index_of(id)](out.main());
  return out;
}

}  // namespace phaseforge
