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

#include "phaseforge/env.hpp"

namespace phaseforge {

Environment::Environment(std::shared_ptr<Backend> backend, EpisodeConfig config)
    : backend_(std::move(backend)), config_(config) {
  if (config_.length < 1) {
    throw std::invalid_argument("episode length must be at least 1");
  }
}

StateVector Environment::reset(const Benchmark& bench) {
  bench_ = &bench;
  state_ = EpisodeState{};
  state_.current_program = bench.program;
  const Evaluation e = backend_->in_process()
                           ? evaluate_program(bench.program)
                           : backend_->evaluate(bench, {});
  state_.c0 = state_.c_prev = e.cycles;
  state_.features = e.features;
  return observation();
}

StateVector Environment::observation() const {
  return normalize_state(state_.features, histogram_state(state_.applied),
                         config_.length - state_.step_index, config_.length,
                         config_.state_mode);
}

StepOutcome Environment::step(PassId action) {
  if (bench_ == nullptr) throw std::logic_error("step before reset");
  if (done()) throw std::logic_error("step on a finished episode");
  state_.applied.push_back(action);
  Evaluation e;
  if (backend_->in_process()) {
    state_.current_program = apply_pass(action, state_.current_program);
    e = evaluate_program(state_.current_program);
  } else {
    e = backend_->evaluate(*bench_, state_.applied);
  }
  ++state_.step_index;

  StepOutcome out;
  out.done = done();
  out.cycles = e.cycles;
  const double c0 = static_cast<double>(state_.c0);
  if (config_.reward_mode == RewardMode::kPerStep) {
    out.reward = (static_cast<double>(state_.c_prev) -
                  static_cast<double>(e.cycles)) / c0;
  } else if (out.done) {
    out.reward = (c0 - static_cast<double>(e.cycles)) / c0;
  }
  state_.c_prev = e.cycles;
  state_.features = e.features;
  out.state = observation();
  return out;
}

CorpusEnv::CorpusEnv(std::vector<Benchmark> benchmarks,
                     std::shared_ptr<Backend> backend, EpisodeConfig config)
    : benchmarks_(std::move(benchmarks)), env_(std::move(backend), config) {
  if (benchmarks_.empty()) throw std::invalid_argument("empty corpus");
}

StateVector CorpusEnv::reset(std::size_t task) {
  return env_.reset(benchmarks_.at(task));
}

}  // namespace phaseforge
