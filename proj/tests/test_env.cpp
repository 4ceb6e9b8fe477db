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

#include <gtest/gtest.h>

#include <memory>
#include <stdexcept>

#include "phaseforge/env.hpp"
#include "phaseforge/random.hpp"
#include "support.hpp"

namespace pf = phaseforge;
using pf::PassId;

namespace {

pf::Environment make_env(int length, pf::RewardMode mode = pf::RewardMode::kPerStep) {
  return pf::Environment(std::make_shared<pf::BuiltinBackend>(),
                         {length, pf::StateMode::kBoth, mode});
}

}  // namespace

TEST(Env, ResetFold) {
  const auto bench = pf_test::fixture("fold");
  auto env = make_env(3);
  const auto s = env.reset(bench);
  EXPECT_EQ(env.state().c0, 5u);
  EXPECT_EQ(env.state().c_prev, 5u);
  EXPECT_EQ(env.state().step_index, 0);
  EXPECT_TRUE(env.state().applied.empty());
  ASSERT_EQ(s.size(), pf::kStateSize);
  for (std::size_t i = 56; i < 68; ++i) EXPECT_EQ(s[i], 0.0);
  EXPECT_EQ(s[68], 1.0);
}

TEST(Env, ResetTrivialAndDeterministic) {
  const auto ret5 = pf_test::fixture("ret5");
  auto env = make_env(3);
  const auto a = env.reset(ret5);
  EXPECT_EQ(env.state().c0, 1u);
  env.step(PassId::kDce);
  EXPECT_EQ(env.reset(ret5), a);
}

TEST(Env, StepReward) {
  const auto bench = pf_test::fixture("fold");
  auto env = make_env(3);
  env.reset(bench);
  const auto out = env.step(PassId::kConstFold);
  EXPECT_DOUBLE_EQ(out.reward, 0.8);
  EXPECT_EQ(out.cycles, 1u);
  EXPECT_FALSE(out.done);
  const auto noop = env.step(PassId::kLicm);
  EXPECT_EQ(noop.reward, 0.0);
  EXPECT_EQ(noop.state[56 + 1], 1.0 / 3.0);
  EXPECT_EQ(noop.state[56 + 5], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(noop.state[68], 1.0 / 3.0);
}

TEST(Env, HorizonAndContract) {
  const auto bench = pf_test::fixture("loop");
  auto env = make_env(4);
  env.reset(bench);
  for (int k = 0; k < 4; ++k) {
    const auto out = env.step(PassId::kCse);
    EXPECT_EQ(out.done, k == 3);
    EXPECT_EQ(env.state().step_index, k + 1);
    EXPECT_EQ(env.state().applied.size(), static_cast<std::size_t>(k + 1));
  }
  EXPECT_THROW(env.step(PassId::kCse), std::logic_error);
  EXPECT_THROW(pf::Environment(std::make_shared<pf::BuiltinBackend>(), {0}), std::invalid_argument);
}

TEST(Env, TelescopingAndSpeedup) {
  pf::Rng rng(5);
  for (const auto& bench : pf_test::all_programs()) {
    for (int trial = 0; trial < 10; ++trial) {
      auto env = make_env(6);
      env.reset(bench);
      double total = 0.0;
      pf::StepOutcome out;
      do {
        out = env.step(*pf::pass_from_index(rng.uniform_int(12)));
        total += out.reward;
      } while (!out.done);
      const double c0 = static_cast<double>(env.state().c0);
      const double cf = static_cast<double>(out.cycles);
      EXPECT_NEAR(total, (c0 - cf) / c0, 1e-12) << bench.id;
      EXPECT_NEAR(c0 / cf, 1.0 / (1.0 - total), 1e-9) << bench.id;
      EXPECT_EQ(out.cycles,
                pf::estimate_cycles(pf::apply_sequence(env.state().applied, bench.program)));
    }
  }
}

TEST(Env, CostIncreaseIsNegativeReward) {
  // unroll2 duplicates the self-loop body at the same depth.
  const auto bench = pf_test::fixture("loop");
  auto env = make_env(1);
  env.reset(bench);
  const auto out = env.step(PassId::kUnroll2);
  EXPECT_GT(out.cycles, 52u);
  EXPECT_LT(out.reward, 0.0);
}

TEST(Env, FinalOnlyReward) {
  const auto bench = pf_test::fixture("fold");
  auto env = make_env(3, pf::RewardMode::kFinalOnly);
  env.reset(bench);
  EXPECT_EQ(env.step(PassId::kConstFold).reward, 0.0);
  EXPECT_EQ(env.step(PassId::kDce).reward, 0.0);
  EXPECT_DOUBLE_EQ(env.step(PassId::kDce).reward, 0.8);
}

TEST(Env, StateModes) {
  const auto bench = pf_test::fixture("fold");
  pf::Environment feat(std::make_shared<pf::BuiltinBackend>(), {3, pf::StateMode::kFeatures});
  pf::Environment hist(std::make_shared<pf::BuiltinBackend>(), {3, pf::StateMode::kHistogram});
  feat.reset(bench);
  hist.reset(bench);
  const auto a = feat.step(PassId::kCse).state;
  const auto b = hist.step(PassId::kCse).state;
  EXPECT_GT(a[20], 0.0);
  EXPECT_EQ(a[56 + 3], 0.0);
  EXPECT_EQ(b[20], 0.0);
  EXPECT_DOUBLE_EQ(b[56 + 3], 1.0 / 3.0);
}

TEST(Env, CorpusEnvTasks) {
  pf::CorpusEnv env(pf::load_corpus(pf_test::fixtures_dir()),
                    std::make_shared<pf::BuiltinBackend>(), {2});
  ASSERT_EQ(env.num_tasks(), 3u);
  EXPECT_EQ(env.task_id(0), "fold");
  EXPECT_EQ(env.task_id(2), "ret5");
  EXPECT_EQ(env.horizon(), 2);
  env.reset(0);
  EXPECT_DOUBLE_EQ(env.step(PassId::kConstFold).reward, 0.8);
  EXPECT_TRUE(env.step(PassId::kDce).done);
}
