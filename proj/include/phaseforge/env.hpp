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

// Fixed-horizon phase-ordering episodes. Each step applies one pass and pays
// the relative cycle improvement, so an episode's undiscounted return is
// (c0 - c_final) / c0.

#ifndef PHASEFORGE_ENV_HPP_
#define PHASEFORGE_ENV_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseforge/backend.hpp"
#include "phaseforge/features.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge {

enum class RewardMode : std::uint8_t {
  kPerStep,   // (c_prev - c_new) / c0 every step
  kFinalOnly  // zero until the last step, then (c0 - c_final) / c0
};

struct EpisodeConfig {
  int length = 3;
  StateMode state_mode = StateMode::kBoth;
  RewardMode reward_mode = RewardMode::kPerStep;
};

struct EpisodeState {
  Program current_program;
  PassSequence applied;
  CycleCount c0 = 0;
  CycleCount c_prev = 0;
  int step_index = 0;
  FeatureVector features{};
};

struct StepOutcome {
  StateVector state;
  double reward = 0.0;
  bool done = false;
  CycleCount cycles = 0;
};

class Environment {
 public:
  Environment(std::shared_ptr<Backend> backend, EpisodeConfig config);

  StateVector reset(const Benchmark& bench);
  // Throws std::logic_error once the episode is done.
  StepOutcome step(PassId action);

  const EpisodeState& state() const { return state_; }
  const EpisodeConfig& config() const { return config_; }
  bool done() const { return state_.step_index >= config_.length; }
  StateVector observation() const;

 private:
  std::shared_ptr<Backend> backend_;
  EpisodeConfig config_;
  const Benchmark* bench_ = nullptr;
  EpisodeState state_;
};

// Episodic task interface the learners train against: a set of tasks (one
// per program) with a common horizon and the 12-way action space.
class TaskEnv {
 public:
  virtual ~TaskEnv() = default;
  virtual std::size_t num_tasks() const = 0;
  virtual std::string task_id(std::size_t task) const = 0;
  virtual int horizon() const = 0;
  virtual StateVector reset(std::size_t task) = 0;
  virtual StepOutcome step(PassId action) = 0;
};

class CorpusEnv : public TaskEnv {
 public:
  CorpusEnv(std::vector<Benchmark> benchmarks, std::shared_ptr<Backend> backend,
            EpisodeConfig config);

  std::size_t num_tasks() const override { return benchmarks_.size(); }
  std::string task_id(std::size_t task) const override {
    return benchmarks_[task].id;
  }
  int horizon() const override { return env_.config().length; }
  StateVector reset(std::size_t task) override;
  StepOutcome step(PassId action) override { return env_.step(action); }

  const Benchmark& benchmark(std::size_t task) const { return benchmarks_[task]; }

 private:
  std::vector<Benchmark> benchmarks_;
  Environment env_;
};

}  // namespace phaseforge

#endif  // PHASEFORGE_ENV_HPP_
