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

// Learned pass-ordering policies: a Q-network trained with experience replay
// and a softmax policy trained with REINFORCE. Both act greedily on the
// network output once trained, and both persist to the same JSON checkpoint.

#ifndef PHASEFORGE_AGENTS_HPP_
#define PHASEFORGE_AGENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/env.hpp"
#include "phaseforge/nn.hpp"
#include "phaseforge/random.hpp"

namespace phaseforge {

enum class Algorithm : std::uint8_t { kDqn, kPg };

std::string_view algorithm_tag(Algorithm a);
// Throws std::invalid_argument for anything but dqn|pg.
Algorithm parse_algorithm(std::string_view tag);

struct DqnConfig {
  std::vector<std::size_t> hidden = {64, 64};
  double learning_rate = 1e-3;
  double gamma = 0.9;
  std::size_t replay_capacity = 10000;
  std::size_t batch_size = 32;
  long target_sync_steps = 500;
  std::size_t learning_starts = 200;
  int updates_per_step = 4;  // gradient steps per environment step
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.7;
};

struct PgConfig {
  std::vector<std::size_t> hidden = {64, 64};
  double learning_rate = 1e-3;
  double baseline_decay = 0.9;
  bool use_baseline = true;
  double entropy_coef = 0.01;
  int batch_episodes = 10;
};

struct Transition {
  StateVector state;
  PassId action = PassId::kConstProp;
  double reward = 0.0;
  StateVector next_state;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Evicts the oldest transition once full.
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }
  // `n` indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

struct AgentMetadata {
  long episodes = 0;
  std::uint64_t seed = 0;
  int length = 3;
  StateMode state_mode = StateMode::kBoth;
  std::vector<std::string> programs;  // task ids seen in training
  std::string config_json = "{}";     // hyperparameter echo
};

class Agent {
 public:
  Agent(Algorithm algorithm, DenseNet net, AgentMetadata metadata = {});

  Algorithm algorithm() const { return algorithm_; }
  const DenseNet& net() const { return net_; }
  DenseNet& net() { return net_; }
  const AgentMetadata& metadata() const { return metadata_; }
  AgentMetadata& metadata() { return metadata_; }

  // Highest Q-value or highest-probability action; ties go to the lowest id.
  PassId greedy_action(std::span<const double> state) const;

 private:
  Algorithm algorithm_;
  DenseNet net_;
  AgentMetadata metadata_;
};

std::vector<std::size_t> default_layer_dims(std::span<const std::size_t> hidden);

// Uniform over all actions with probability epsilon, else the greedy action.
PassId dqn_select_action(const DenseNet& q, std::span<const double> state,
                         double epsilon, Rng& rng);

// Epsilon for global step `step` of `total_steps`: linear from start to end
// over the first `fraction` of training, then flat.
double epsilon_at(const DqnConfig& cfg, long step, long total_steps);

struct EpisodeRecord {
  long episode = 0;
  std::string program;
  double episode_return = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;  // over updates made during the episode; 0 if none
  PassSequence sequence;
  CycleCount cycles = 0;
};

struct BestFound {
  PassSequence sequence;
  CycleCount cycles = 0;
};

struct TrainingResult {
  Agent agent;
  std::vector<EpisodeRecord> log;
  std::map<std::string, BestFound> best;  // by task id, ties keep the first
};

// Observes (gradient step count, online net, target net) after every update,
// once any target sync for that step has happened.
using DqnUpdateHook =
    std::function<void(long, const DenseNet&, const DenseNet&)>;

// Throws std::invalid_argument on an empty task set and TrainingError on a
// non-finite loss.
TrainingResult dqn_train(TaskEnv& env, long episodes, const DqnConfig& cfg,
                         std::uint64_t seed, StateMode state_mode,
                         const DqnUpdateHook& on_update = {});
TrainingResult pg_train(TaskEnv& env, long episodes, const PgConfig& cfg,
                        std::uint64_t seed, StateMode state_mode);

// One JSON object per line: episode, program, return, epsilon, loss_mean,
// sequence, cycles.
std::string format_training_log(std::span<const EpisodeRecord> log);

struct Rollout {
  PassSequence sequence;
  CycleCount cycles = 0;
  double episode_return = 0.0;
};

Rollout greedy_rollout(const Agent& agent, TaskEnv& env, std::size_t task);

// Policy probabilities of a PG network.
std::vector<double> policy_probabilities(const DenseNet& net,
                                         std::span<const double> state);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_to_json(const Agent& agent);
Agent checkpoint_from_json(std::string_view text);
// Written to a sibling temporary then renamed into place.
void save_agent(const Agent& agent, const std::filesystem::path& path);
Agent load_agent(const std::filesystem::path& path);
// As load_agent, but also rejects a checkpoint of another algorithm.
Agent load_agent(const std::filesystem::path& path, Algorithm expected);

}  // namespace phaseforge

#endif  // PHASEFORGE_AGENTS_HPP_
