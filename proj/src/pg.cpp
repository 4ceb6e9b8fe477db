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

std::string config_echo(const PgConfig& c, long episodes, int horizon) {
  return nlohmann::json{{"hidden", c.hidden},
                        {"learning_rate", c.learning_rate},
                        {"baseline_decay", c.baseline_decay},
                        {"use_baseline", c.use_baseline},
                        {"entropy_coef", c.entropy_coef},
                        {"batch_episodes", c.batch_episodes},
                        {"episodes", episodes},
                        {"length", horizon}}
      .dump();
}

PassId sample_action(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return *pass_from_index(static_cast<long>(i));
  }
  return *pass_from_index(static_cast<long>(probs.size() - 1));
}

// Loss -A log p(a) - beta H(p) on the logits of one visited state.
SampleLoss reinforce_loss(std::size_t action, double advantage, double beta) {
  return [=](std::span<const double> logits, std::span<double> grad) {
    const std::vector<double> p = softmax(logits);
    double entropy = 0.0;
    for (double q : p) {
      if (q > 0.0) entropy -= q * std::log(q);
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double onehot = j == action ? 1.0 : 0.0;
      const double log_p = p[j] > 0.0 ? std::log(p[j]) : 0.0;
      grad[j] = -advantage * (onehot - p[j]) + beta * p[j] * (log_p + entropy);
    }
    return -advantage * std::log(std::max(p[action], 1e-300)) - beta * entropy;
  };
}

struct Trajectory {
  std::size_t task = 0;
  std::vector<StateVector> states;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
};

}  // namespace

TrainingResult pg_train(TaskEnv& env, long episodes, const PgConfig& cfg,
                        std::uint64_t seed, StateMode state_mode) {
  if (env.num_tasks() == 0) throw std::invalid_argument("empty corpus");
  if (cfg.batch_episodes <= 0) throw std::invalid_argument("batch_episodes must be positive");

  Rng rng(seed);
  DenseNet net(default_layer_dims(cfg.hidden), rng);
  Adam opt(net.num_params(), {.learning_rate = cfg.learning_rate});

  AgentMetadata meta;
  meta.episodes = episodes;
  meta.seed = seed;
  meta.length = env.horizon();
  meta.state_mode = state_mode;
  for (std::size_t t = 0; t < env.num_tasks(); ++t) meta.programs.push_back(env.task_id(t));
  meta.config_json = config_echo(cfg, episodes, env.horizon());

  std::vector<EpisodeRecord> log;
  std::map<std::string, BestFound> best;
  double baseline = 0.0;

  for (long start = 0; start < episodes; start += cfg.batch_episodes) {
    const long end = std::min(episodes, start + cfg.batch_episodes);
    std::vector<Trajectory> batch;
    for (long ep = start; ep < end; ++ep) {
      Trajectory tr;
      tr.task = static_cast<std::size_t>(ep) % env.num_tasks();
      EpisodeRecord rec;
      rec.episode = ep;
      rec.program = env.task_id(tr.task);
      StateVector s = env.reset(tr.task);
      for (int t = 0; t < env.horizon(); ++t) {
        const PassId a = sample_action(policy_probabilities(net, s), rng);
        StepOutcome out = env.step(a);
        tr.states.push_back(std::move(s));
        tr.actions.push_back(index_of(a));
        tr.rewards.push_back(out.reward);
        rec.sequence.push_back(a);
        rec.cycles = out.cycles;
        rec.episode_return += out.reward;
        s = std::move(out.state);
        if (out.done) break;
      }
      auto [it, fresh] = best.try_emplace(rec.program, BestFound{rec.sequence, rec.cycles});
      if (!fresh && rec.cycles < it->second.cycles) it->second = {rec.sequence, rec.cycles};
      log.push_back(std::move(rec));
      batch.push_back(std::move(tr));
    }

    std::vector<std::vector<double>> inputs;
    std::vector<SampleLoss> losses;
    for (Trajectory& tr : batch) {
      double to_go = 0.0;
      std::vector<double> rtg(tr.rewards.size());
      for (std::size_t t = tr.rewards.size(); t-- > 0;) {
        to_go += tr.rewards[t];
        rtg[t] = to_go;
      }
      for (std::size_t t = 0; t < tr.states.size(); ++t) {
        inputs.push_back(std::move(tr.states[t]));
        losses.push_back(reinforce_loss(tr.actions[t], rtg[t] - baseline, cfg.entropy_coef));
      }
    }
    double loss = 0.0;
    if (!inputs.empty()) loss = train_step(net, opt, inputs, losses);
    for (long ep = start; ep < end; ++ep) {
      log[static_cast<std::size_t>(ep)].loss_mean = loss;
      if (cfg.use_baseline) {
        baseline = cfg.baseline_decay * baseline +
                   (1.0 - cfg.baseline_decay) * log[static_cast<std::size_t>(ep)].episode_return;
      }
    }
  }

  return {Agent(Algorithm::kPg, std::move(net), std::move(meta)), std::move(log),
          std::move(best)};
}

}  // namespace phaseforge
