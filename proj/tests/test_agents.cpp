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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "phaseforge/agents.hpp"
#include "phaseforge/env.hpp"
#include "phaseforge/nn.hpp"
#include "phaseforge/random.hpp"
#include "support.hpp"

namespace pf = phaseforge;
using pf::PassId;

namespace {

// One-step task where a single action pays `reward` and the rest pay 0.
class Bandit : public pf::TaskEnv {
 public:
  explicit Bandit(std::size_t good, double reward = 1.0) : good_(good), reward_(reward) {}
  std::size_t num_tasks() const override { return 1; }
  std::string task_id(std::size_t) const override { return "bandit"; }
  int horizon() const override { return 1; }
  pf::StateVector reset(std::size_t) override {
    done_ = false;
    return state();
  }
  pf::StepOutcome step(PassId a) override {
    done_ = true;
    pf::StepOutcome out;
    out.state = state();
    out.done = true;
    out.reward = pf::index_of(a) == good_ ? reward_ : 0.0;
    out.cycles = 1;
    return out;
  }
  pf::StateVector state() const {
    pf::StateVector s(pf::kStateSize, 0.0);
    for (std::size_t i = 0; i < pf::kNumFeatures; ++i) s[i] = std::log2(1.0 + (i % 7));
    s[68] = done_ ? 0.0 : 1.0;
    return s;
  }

 private:
  std::size_t good_;
  double reward_;
  bool done_ = false;
};

std::vector<double> random_vector(pf::Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("phaseforge_agents_" + std::to_string(::getpid()) + "_" + name);
}

pf::Agent random_agent(pf::Algorithm algo, std::uint64_t seed) {
  pf::Rng rng(seed);
  return pf::Agent(algo, pf::DenseNet(pf::default_layer_dims(std::vector<std::size_t>{64, 64}), rng));
}

}  // namespace

TEST(DenseNet, ShapesAndZeroInit) {
  pf::DenseNet net({69, 64, 64, 12});
  EXPECT_EQ(net.num_params(), 69u * 64 + 64 + 64u * 64 + 64 + 64u * 12 + 12);
  EXPECT_EQ(net.num_layers(), 3u);
  const auto out = net.forward(std::vector<double>(69, 0.5));
  ASSERT_EQ(out.size(), 12u);
  for (double v : out) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(net.forward(std::vector<double>(68, 0.0)), std::invalid_argument);
}

TEST(DenseNet, IdentityLayerCopiesInputSlice) {
  pf::DenseNet net({5, 3});
  auto w = net.weights(0);
  for (std::size_t i = 0; i < 3; ++i) w[i * 5 + i] = 1.0;
  const std::vector<double> x = {0.5, -2.0, 7.0, 9.0, 11.0};
  EXPECT_EQ(net.forward(x), (std::vector<double>{0.5, -2.0, 7.0}));
}

TEST(DenseNet, FlatLayoutIsRowMajorThenBias) {
  pf::DenseNet net({2, 2});
  auto p = net.params();
  p[0] = 1.0;  // W[0][0]
  p[1] = 2.0;  // W[0][1]
  p[2] = 3.0;  // W[1][0]
  p[3] = 4.0;  // W[1][1]
  p[4] = 0.5;
  p[5] = -0.5;
  EXPECT_EQ(net.forward(std::vector<double>{1.0, 10.0}), (std::vector<double>{21.5, 42.5}));
}

TEST(DenseNet, HiddenLayersUseRelu) {
  pf::DenseNet net({1, 1, 1});
  net.weights(0)[0] = 1.0;
  net.weights(1)[0] = 1.0;
  EXPECT_EQ(net.forward(std::vector<double>{-3.0})[0], 0.0);
  EXPECT_EQ(net.forward(std::vector<double>{3.0})[0], 3.0);
}

TEST(DenseNet, SeededInitIsStable) {
  pf::Rng a(42), b(42);
  pf::DenseNet x({69, 64, 64, 12}, a);
  pf::DenseNet y({69, 64, 64, 12}, b);
  EXPECT_EQ(x, y);
  pf::Rng r(1);
  const auto in = random_vector(r, 69);
  EXPECT_EQ(x.forward(in), y.forward(in));
  for (std::size_t l = 0; l < x.num_layers(); ++l) {
    for (double v : x.biases(l)) EXPECT_EQ(v, 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(x.layer_dims()[l]));
    for (double v : x.weights(l)) EXPECT_LE(std::abs(v), bound);
  }
}

TEST(TrainStep, ZeroSignalLeavesParameters) {
  pf::Rng rng(3);
  pf::DenseNet net({4, 8, 2}, rng);
  const auto before = net;
  pf::Adam opt(net.num_params(), {});
  const std::vector<std::vector<double>> xs = {random_vector(rng, 4)};
  const std::vector<pf::SampleLoss> losses = {
      [](std::span<const double>, std::span<double>) { return 0.0; }};
  for (int k = 0; k < 5; ++k) pf::train_step(net, opt, xs, losses);
  EXPECT_EQ(net, before);
}

TEST(TrainStep, QuadraticMovesTowardMinimum) {
  pf::DenseNet net({1, 1});
  pf::Adam opt(net.num_params(), {});
  const std::vector<std::vector<double>> xs = {{1.0}};
  const std::vector<pf::SampleLoss> losses = {pf::squared_error({3.0})};
  double prev = std::abs(net.forward(xs[0])[0] - 3.0);
  for (int k = 0; k < 50; ++k) {
    const double before = net.forward(xs[0])[0];
    const double loss = pf::train_step(net, opt, xs, losses);
    EXPECT_DOUBLE_EQ(loss, (before - 3.0) * (before - 3.0));
    const double gap = std::abs(net.forward(xs[0])[0] - 3.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(TrainStep, RegressionLossDropsHundredfold) {
  pf::Rng init(0), data(1);
  pf::DenseNet net({4, 32, 32, 1}, init);
  pf::Adam opt(net.num_params(), {});
  std::vector<std::vector<double>> xs;
  std::vector<pf::SampleLoss> losses;
  for (int i = 0; i < 10; ++i) {
    auto x = random_vector(data, 4);
    const double y = 0.1 * x[0] - 0.05 * x[1] + 0.15 * x[2] + 0.08 * x[3] + 0.05;
    xs.push_back(std::move(x));
    losses.push_back(pf::squared_error({y}));
  }
  const double first = pf::train_step(net, opt, xs, losses);
  for (int s = 1; s < 200; ++s) pf::train_step(net, opt, xs, losses);
  std::vector<double> grad(net.num_params());
  const double last = pf::loss_and_gradient(net, xs, losses, grad);
  EXPECT_GE(first / last, 100.0) << first << " -> " << last;
}

TEST(TrainStep, NonFiniteLossAborts) {
  pf::DenseNet net({2, 1});
  pf::Adam opt(net.num_params(), {});
  const auto before = net;
  const std::vector<std::vector<double>> xs = {{1.0, 1.0}};
  const std::vector<pf::SampleLoss> losses = {
      [](std::span<const double>, std::span<double> g) {
        g[0] = 1.0;
        return std::numeric_limits<double>::quiet_NaN();
      }};
  EXPECT_THROW(pf::train_step(net, opt, xs, losses), pf::TrainingError);
  EXPECT_EQ(net, before);
}

TEST(GradCheck, LinearLayerClosedForm) {
  pf::Rng rng(9);
  pf::DenseNet net({3, 2}, rng);
  const std::vector<double> x = {0.3, -1.2, 2.0};
  const std::vector<double> t = {0.5, -0.25};
  const auto loss = pf::squared_error(t);

  // dL/dW_ij = 2 (o_i - t_i) x_j, dL/db_i = 2 (o_i - t_i).
  const auto o = net.forward(x);
  std::vector<double> want;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) want.push_back(2.0 * (o[i] - t[i]) * x[j]);
  }
  for (std::size_t i = 0; i < 2; ++i) want.push_back(2.0 * (o[i] - t[i]));
  std::vector<double> grad(net.num_params());
  const std::vector<std::vector<double>> xs = {x};
  const std::vector<pf::SampleLoss> ls = {loss};
  pf::loss_and_gradient(net, xs, ls, grad);
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(grad[k], want[k], 1e-12);

  EXPECT_LT(pf::grad_check(net, x, loss, rng), 1e-8);
}

TEST(GradCheck, RandomNetworks) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    pf::Rng rng(seed);
    const std::size_t in = 3 + rng.uniform_int(6);
    const std::size_t hidden = 4 + rng.uniform_int(12);
    const std::size_t out = 1 + rng.uniform_int(5);
    pf::DenseNet net({in, hidden, hidden, out}, rng);
    // Nonzero biases keep pre-activations off the ReLU kink at exactly 0,
    // where central differences disagree with any one-sided derivative.
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (double& b : net.biases(l)) b = rng.uniform(-0.5, 0.5);
    }
    const auto x = random_vector(rng, in);
    const pf::SampleLoss loss = seed % 2 == 0
                                    ? pf::squared_error(random_vector(rng, out))
                                    : pf::selected_squared_error(rng.uniform_int(out), 0.7);
    EXPECT_LT(pf::grad_check(net, x, loss, rng), 1e-4) << "seed " << seed;
  }
}

TEST(GradCheck, CorruptedBackwardIsCaught) {
  pf::Rng rng(4);
  pf::DenseNet net({6, 16, 16, 3}, rng);
  const auto x = random_vector(rng, 6);
  pf::GradCheckOptions opts;
  opts.corrupt_backward = true;
  EXPECT_GT(pf::grad_check(net, x, pf::squared_error({0.1, 0.2, 0.3}), rng, opts), 1e-2);
}

TEST(Softmax, IsADistribution) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    pf::Rng rng(seed);
    pf::DenseNet net({69, 64, 64, 12}, rng);
    const auto p = pf::policy_probabilities(net, random_vector(rng, 69));
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GT(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  const auto big = pf::softmax(std::vector<double>{1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(big[0], 0.5);
}

TEST(Argmax, TiesGoLow) {
  EXPECT_EQ(pf::argmax(std::vector<double>{1.0, 3.0, 3.0}), 1u);
  EXPECT_EQ(pf::argmax(std::vector<double>(12, 0.0)), 0u);
}

TEST(DqnSelect, UniformExploration) {
  pf::DenseNet q({69, 12});
  q.biases(0)[4] = 5.0;
  pf::Rng rng(17);
  const std::vector<double> s(69, 0.0);
  std::vector<int> counts(12, 0);
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++counts[pf::index_of(pf::dqn_select_action(q, s, 1.0, rng))];
  const double mean = n / 12.0;
  const double sigma = std::sqrt(n * (1.0 / 12.0) * (11.0 / 12.0));
  for (int c : counts) EXPECT_NEAR(c, mean, 3 * sigma);
}

TEST(DqnSelect, GreedyArgmaxAndTies) {
  pf::DenseNet q({69, 12});
  pf::Rng rng(0);
  const std::vector<double> s(69, 1.0);
  EXPECT_EQ(pf::dqn_select_action(q, s, 0.0, rng), PassId::kConstProp);
  q.biases(0)[10] = 9.0;
  EXPECT_EQ(pf::dqn_select_action(q, s, 0.0, rng), PassId::kCopyProp);
}

TEST(DqnSchedule, EpsilonAnneals) {
  const pf::DqnConfig cfg;
  EXPECT_DOUBLE_EQ(pf::epsilon_at(cfg, 0, 1000), 1.0);
  EXPECT_NEAR(pf::epsilon_at(cfg, 350, 1000), 0.525, 1e-12);
  EXPECT_NEAR(pf::epsilon_at(cfg, 700, 1000), 0.05, 1e-12);
  EXPECT_NEAR(pf::epsilon_at(cfg, 999, 1000), 0.05, 1e-12);
}

TEST(ReplayBuffer, FifoEviction) {
  pf::ReplayBuffer buf(4);
  for (int k = 0; k < 7; ++k) {
    pf::Transition t;
    t.reward = k;
    buf.push(t);
    EXPECT_LE(buf.size(), buf.capacity());
  }
  ASSERT_EQ(buf.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(buf[i].reward, static_cast<double>(i + 3));
  pf::Rng rng(0);
  for (auto i : buf.sample_indices(100, rng)) EXPECT_LT(i, 4u);
  pf::Transition bad;
  bad.reward = std::numeric_limits<double>::infinity();
  EXPECT_THROW(buf.push(bad), pf::TrainingError);
  EXPECT_THROW(pf::ReplayBuffer(0), std::invalid_argument);
}

TEST(Dqn, LearnsBandit) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Bandit env(7);
    const auto result = pf::dqn_train(env, 500, {}, seed, pf::StateMode::kBoth);
    EXPECT_EQ(result.agent.greedy_action(env.reset(0)), PassId::kInstCombine) << seed;
    EXPECT_EQ(result.log.size(), 500u);
  }
}

TEST(Dqn, TargetNetworkSyncs) {
  Bandit env(2);
  pf::DqnConfig cfg;
  cfg.target_sync_steps = 100;
  std::optional<pf::DenseNet> last_target;
  long calls = 0, syncs = 0;
  pf::dqn_train(env, 400, cfg, 1, pf::StateMode::kBoth,
                [&](long step, const pf::DenseNet& online, const pf::DenseNet& target) {
                  ++calls;
                  if (step % cfg.target_sync_steps == 0) {
                    EXPECT_EQ(target, online) << step;
                    ++syncs;
                  } else if (last_target) {
                    EXPECT_EQ(target, *last_target) << step;
                    EXPECT_NE(target, online) << step;
                  }
                  last_target = target;
                });
  // (400 - 200 + 1) env steps after learning starts, 4 updates each.
  EXPECT_EQ(calls, 201 * 4);
  EXPECT_EQ(syncs, calls / 100);
}

TEST(Dqn, DeterministicLog) {
  const auto corpus = pf::load_corpus(pf_test::fixtures_dir());
  auto run = [&] {
    pf::CorpusEnv env(corpus, std::make_shared<pf::BuiltinBackend>(), {3});
    const auto r = pf::dqn_train(env, 150, {}, 5, pf::StateMode::kBoth);
    return pf::format_training_log(r.log);
  };
  const auto a = run();
  EXPECT_EQ(a, run());
  EXPECT_FALSE(a.empty());
}

TEST(Dqn, FindsOptimumOnFoldFixture) {
  const auto bench = pf_test::fixture("fold");
  const auto oracle = pf_test::exhaustive_oracle(bench.program, 3);
  ASSERT_EQ(oracle.cycles, 1u);
  pf::CorpusEnv env({bench}, std::make_shared<pf::BuiltinBackend>(), {3});
  const auto r = pf::dqn_train(env, 300, {}, 0, pf::StateMode::kBoth);
  EXPECT_EQ(r.best.at("fold").cycles, 1u);
  EXPECT_EQ(pf::estimate_cycles(pf::apply_sequence(r.best.at("fold").sequence, bench.program)),
            1u);
}

TEST(Dqn, RejectsEmptyCorpus) {
  EXPECT_THROW(pf::CorpusEnv({}, std::make_shared<pf::BuiltinBackend>(), {3}),
               std::invalid_argument);
}

TEST(Pg, LearnsBandit) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Bandit env(7);
    const auto result = pf::pg_train(env, 1000, {}, seed, pf::StateMode::kBoth);
    const auto p = pf::policy_probabilities(result.agent.net(), env.reset(0));
    EXPECT_GT(p[7], 0.9) << seed;
  }
}

TEST(Pg, ZeroRewardZeroEntropyKeepsParameters) {
  Bandit env(7, 0.0);
  pf::PgConfig cfg;
  cfg.entropy_coef = 0.0;
  cfg.use_baseline = false;
  const auto result = pf::pg_train(env, 50, cfg, 3, pf::StateMode::kBoth);
  pf::Rng rng(3);
  const pf::DenseNet init(pf::default_layer_dims(cfg.hidden), rng);
  EXPECT_EQ(result.agent.net(), init);
}

TEST(Pg, DeterministicLog) {
  const auto corpus = pf::load_corpus(pf_test::fixtures_dir());
  auto run = [&] {
    pf::CorpusEnv env(corpus, std::make_shared<pf::BuiltinBackend>(), {3});
    return pf::format_training_log(pf::pg_train(env, 60, {}, 8, pf::StateMode::kBoth).log);
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainingLog, JsonLines) {
  const auto corpus = pf::load_corpus(pf_test::fixtures_dir());
  pf::CorpusEnv env(corpus, std::make_shared<pf::BuiltinBackend>(), {2});
  const auto r = pf::pg_train(env, 6, {}, 0, pf::StateMode::kBoth);
  std::istringstream in(pf::format_training_log(r.log));
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"episode", "program", "return", "epsilon", "loss_mean",
                            "sequence", "cycles"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["episode"], n);
    EXPECT_EQ(j["program"], corpus[static_cast<std::size_t>(n) % 3].id);
    ++n;
  }
  EXPECT_EQ(n, 6);
}

TEST(Checkpoint, JsonRoundTrip) {
  auto agent = random_agent(pf::Algorithm::kDqn, 12);
  agent.metadata().episodes = 77;
  agent.metadata().programs = {"a", "b"};
  const auto back = pf::checkpoint_from_json(pf::checkpoint_to_json(agent));
  EXPECT_EQ(back.algorithm(), pf::Algorithm::kDqn);
  EXPECT_EQ(back.net(), agent.net());
  EXPECT_EQ(back.metadata().episodes, 77);
  EXPECT_EQ(back.metadata().programs, agent.metadata().programs);
  const auto j = nlohmann::json::parse(pf::checkpoint_to_json(agent));
  EXPECT_EQ(j["version"], pf::kCheckpointVersion);
  EXPECT_EQ(j["algorithm"], "dqn");
  EXPECT_EQ(j["layer_dims"], (std::vector<std::size_t>{69, 64, 64, 12}));
  EXPECT_EQ(j["params"].size(), agent.net().num_params());
}

TEST(Checkpoint, FileRoundTripKeepsRollouts) {
  const auto path = temp_path("rt.json");
  auto agent = random_agent(pf::Algorithm::kPg, 21);
  pf::save_agent(agent, path);
  const auto loaded = pf::load_agent(path, pf::Algorithm::kPg);
  pf::CorpusEnv env(pf::load_corpus(pf_test::fixtures_dir()),
                    std::make_shared<pf::BuiltinBackend>(), {12});
  for (std::size_t t = 0; t < env.num_tasks(); ++t) {
    const auto a = pf::greedy_rollout(agent, env, t);
    const auto b = pf::greedy_rollout(loaded, env, t);
    EXPECT_EQ(a.sequence, b.sequence);
    EXPECT_EQ(a.cycles, b.cycles);
  }
  pf::Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto s = random_vector(rng, 69);
    EXPECT_EQ(agent.greedy_action(s), loaded.greedy_action(s));
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, Errors) {
  const auto agent = random_agent(pf::Algorithm::kDqn, 1);
  const std::string text = pf::checkpoint_to_json(agent);

  const auto truncated = temp_path("trunc.json");
  {
    std::ofstream out(truncated);
    out << text.substr(0, text.size() / 2);
  }
  EXPECT_THROW(pf::load_agent(truncated), pf::CheckpointError);
  std::filesystem::remove(truncated);
  EXPECT_THROW(pf::load_agent(temp_path("missing.json")), pf::CheckpointError);

  const auto path = temp_path("dqn.json");
  pf::save_agent(agent, path);
  EXPECT_THROW(pf::load_agent(path, pf::Algorithm::kPg), pf::CheckpointError);
  EXPECT_NO_THROW(pf::load_agent(path, pf::Algorithm::kDqn));
  std::filesystem::remove(path);

  auto j = nlohmann::json::parse(text);
  auto version = j;
  version["version"] = 99;
  EXPECT_THROW(pf::checkpoint_from_json(version.dump()), pf::CheckpointError);
  auto dims = j;
  dims["layer_dims"] = {69, 64, 64, 11};
  EXPECT_THROW(pf::checkpoint_from_json(dims.dump()), pf::CheckpointError);
  auto count = j;
  count["params"].erase(count["params"].size() - 1);
  EXPECT_THROW(pf::checkpoint_from_json(count.dump()), pf::CheckpointError);
  EXPECT_THROW(pf::checkpoint_from_json("[1,2,3]"), pf::CheckpointError);
  EXPECT_THROW(pf::checkpoint_from_json(""), pf::CheckpointError);
}

TEST(Agent, RejectsWrongShape) {
  EXPECT_THROW(pf::Agent(pf::Algorithm::kDqn, pf::DenseNet({69, 11})), std::invalid_argument);
  EXPECT_THROW(pf::parse_algorithm("ppo"), std::invalid_argument);
  EXPECT_EQ(pf::parse_algorithm("pg"), pf::Algorithm::kPg);
}
