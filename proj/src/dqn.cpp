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

#include <cmath>

#include "json.hpp"

#include "phaseforge/agents.hpp"

namespace phaseforge {

namespace {

std::string config_echo(const DqnConfig& c, long episodes, int horizon) {
  return nlohmann::json{{"hidden", c.hidden},
                        {"learning_rate", c.learning_rate},
                        {"gamma", c.gamma},
                        {"replay_capacity", c.replay_capacity},
                        {"batch_size", c.batch_size},
                        {"target_sync_steps", c.target_sync_steps},
                        {"learning_starts", c.learning_starts},
                        {"updates_per_step", c.updates_per_step},
                        {"epsilon_start", c.epsilon_start},
                        {"epsilon_end", c.epsilon_end},
                        {"epsilon_fraction", c.epsilon_fraction},
                        {"episodes", episodes},
                        {"length", horizon}}
      .dump();
}

}  // namespace

TrainingResult dqn_train(TaskEnv& env, long episodes, const DqnConfig& cfg,
                         std::uint64_t seed, StateMode state_mode,
                         const DqnUpdateHook& on_update) {
  if (env.num_tasks() == 0) throw std::invalid_argument("empty corpus");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");

  Rng rng(seed);
  DenseNet online(default_layer_dims(cfg.hidden), rng);
  DenseNet target = online;
  Adam opt(online.num_params(), {.learning_rate = cfg.learning_rate});
  ReplayBuffer replay(cfg.replay_capacity);

  AgentMetadata meta;
  meta.episodes = episodes;
  meta.seed = seed;
  meta.length = env.horizon();
  meta.state_mode = state_mode;
  for (std::size_t t = 0; t < env.num_tasks(); ++t) meta.programs.push_back(env.task_id(t));
  meta.config_json = config_echo(cfg, episodes, env.horizon());

  std::vector<EpisodeRecord> log;
  std::map<std::string, BestFound> best;
  const long total_steps = episodes * env.horizon();
  long step = 0;
  long grad_steps = 0;

  std::vector<std::vector<double>> inputs(cfg.batch_size);
  std::vector<SampleLoss> losses(cfg.batch_size);

  for (long ep = 0; ep < episodes; ++ep) {
    const std::size_t task = static_cast<std::size_t>(ep) % env.num_tasks();
    EpisodeRecord rec;
    rec.episode = ep;
    rec.program = env.task_id(task);
    rec.epsilon = epsilon_at(cfg, step, total_steps);
    double loss_sum = 0.0;
    long loss_count = 0;

    StateVector s = env.reset(task);
    for (int t = 0; t < env.horizon(); ++t) {
      const PassId a = dqn_select_action(online, s, epsilon_at(cfg, step, total_steps), rng);
      StepOutcome out = env.step(a);
      ++step;
      rec.sequence.push_back(a);
      rec.cycles = out.cycles;
      rec.episode_return += out.reward;
      replay.push({s, a, out.reward, out.state, out.done});
      s = std::move(out.state);

      for (int u = 0; u < cfg.updates_per_step &&
                      replay.size() >= std::max<std::size_t>(cfg.learning_starts, 1);
           ++u) {
        const auto idx = replay.sample_indices(cfg.batch_size, rng);
        for (std::size_t b = 0; b < idx.size(); ++b) {
          const Transition& tr = replay[idx[b]];
          double y = tr.reward;
          if (!tr.done) {
            const auto q_next = target.forward(tr.next_state);
            y += cfg.gamma * q_next[argmax(q_next)];
          }
          inputs[b] = tr.state;
          losses[b] = selected_squared_error(index_of(tr.action), y);
        }
        loss_sum += train_step(online, opt, inputs, losses);
        ++loss_count;
        if (++grad_steps % cfg.target_sync_steps == 0) target = online;
        if (on_update) on_update(grad_steps, online, target);
      }
      if (out.done) break;
    }
    rec.loss_mean = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;

    auto [it, fresh] = best.try_emplace(rec.program, BestFound{rec.sequence, rec.cycles});
    if (!fresh && rec.cycles < it->second.cycles) it->second = {rec.sequence, rec.cycles};
    log.push_back(std::move(rec));
  }

  return {Agent(Algorithm::kDqn, std::move(online), std::move(meta)), std::move(log),
          std::move(best)};
}

}  // namespace phaseforge
