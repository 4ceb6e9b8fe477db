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

#include "phaseforge/agents.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace phaseforge {

using nlohmann::json;

std::string_view algorithm_tag(Algorithm a) {
  return a == Algorithm::kDqn ? "dqn" : "pg";
}

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "dqn") return Algorithm::kDqn;
  if (tag == "pg") return Algorithm::kPg;
  throw std::invalid_argument("unknown agent algorithm '" + std::string(tag) +
                              "' (expected dqn or pg)");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (!std::isfinite(t.reward)) {
    throw TrainingError("non-finite reward in transition");
  }
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n,
                                                      Rng& rng) const {
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.uniform_int(items_.size());
  return out;
}

Agent::Agent(Algorithm algorithm, DenseNet net, AgentMetadata metadata)
    : algorithm_(algorithm), net_(std::move(net)), metadata_(std::move(metadata)) {
  if (net_.input_size() != kStateSize || net_.output_size() != kNumPasses) {
    throw std::invalid_argument("agent network must map " +
                                std::to_string(kStateSize) + " inputs to " +
                                std::to_string(kNumPasses) + " outputs");
  }
}

PassId Agent::greedy_action(std::span<const double> state) const {
  // Softmax is monotone, so the most probable PG action is the top logit.
  return *pass_from_index(static_cast<long>(argmax(net_.forward(state))));
}

std::vector<std::size_t> default_layer_dims(std::span<const std::size_t> hidden) {
  std::vector<std::size_t> dims{kStateSize};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(kNumPasses);
  return dims;
}

PassId dqn_select_action(const DenseNet& q, std::span<const double> state,
                         double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return *pass_from_index(static_cast<long>(rng.uniform_int(kNumPasses)));
  }
  return *pass_from_index(static_cast<long>(argmax(q.forward(state))));
}

double epsilon_at(const DqnConfig& cfg, long step, long total_steps) {
  const double span = cfg.epsilon_fraction * static_cast<double>(total_steps);
  if (span <= 0.0) return cfg.epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(step) / span);
  return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start);
}

std::string format_training_log(std::span<const EpisodeRecord> log) {
  std::string out;
  for (const EpisodeRecord& r : log) {
    json seq = json::array();
    for (PassId p : r.sequence) seq.push_back(index_of(p));
    json line = {{"episode", r.episode},   {"program", r.program},
                 {"return", r.episode_return}, {"epsilon", r.epsilon},
                 {"loss_mean", r.loss_mean}, {"sequence", seq},
                 {"cycles", r.cycles}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

Rollout greedy_rollout(const Agent& agent, TaskEnv& env, std::size_t task) {
  Rollout r;
  StateVector s = env.reset(task);
  for (int t = 0; t < env.horizon(); ++t) {
    const PassId a = agent.greedy_action(s);
    StepOutcome out = env.step(a);
    r.sequence.push_back(a);
    r.cycles = out.cycles;
    r.episode_return += out.reward;
    s = std::move(out.state);
    if (out.done) break;
  }
  return r;
}

std::vector<double> policy_probabilities(const DenseNet& net,
                                         std::span<const double> state) {
  return softmax(net.forward(state));
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string checkpoint_to_json(const Agent& agent) {
  const AgentMetadata& m = agent.metadata();
  json config = json::parse(m.config_json, nullptr, false);
  if (config.is_discarded()) config = json::object();
  json doc = {
      {"format", "phase-forge-agent"},
      {"version", kCheckpointVersion},
      {"algorithm", algorithm_tag(agent.algorithm())},
      {"layer_dims", agent.net().layer_dims()},
      {"params", std::vector<double>(agent.net().params().begin(),
                                     agent.net().params().end())},
      {"metadata",
       {{"episodes", m.episodes},
        {"seed", m.seed},
        {"length", m.length},
        {"state_mode", state_mode_name(m.state_mode)},
        {"programs", m.programs},
        {"config", config}}}};
  return doc.dump(1) + "\n";
}

Agent checkpoint_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw CheckpointError("malformed checkpoint: not a JSON object");
  }
  try {
    if (doc.value("format", "") != "phase-forge-agent") {
      throw CheckpointError("malformed checkpoint: missing format tag");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    const Algorithm algo = parse_algorithm(doc.at("algorithm").get<std::string>());
    auto dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
    auto params = doc.at("params").get<std::vector<double>>();
    if (dims.size() < 2 || dims.front() != kStateSize ||
        dims.back() != kNumPasses) {
      throw CheckpointError("checkpoint layer dims do not map " +
                            std::to_string(kStateSize) + " inputs to " +
                            std::to_string(kNumPasses) + " actions");
    }
    DenseNet net(dims);
    if (params.size() != net.num_params()) {
      throw CheckpointError("checkpoint has " + std::to_string(params.size()) +
                            " parameters, layer dims need " +
                            std::to_string(net.num_params()));
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw CheckpointError("non-finite parameter in checkpoint");
    }
    std::copy(params.begin(), params.end(), net.params().begin());

    AgentMetadata m;
    const json& meta = doc.at("metadata");
    m.episodes = meta.at("episodes").get<long>();
    m.seed = meta.at("seed").get<std::uint64_t>();
    m.length = meta.at("length").get<int>();
    m.state_mode = parse_state_mode(meta.at("state_mode").get<std::string>());
    m.programs = meta.at("programs").get<std::vector<std::string>>();
    m.config_json = meta.value("config", json::object()).dump();
    return Agent(algo, std::move(net), std::move(m));
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_agent(const Agent& agent, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out << checkpoint_to_json(agent);
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into " + path.string());
}

Agent load_agent(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return checkpoint_from_json(ss.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Agent load_agent(const std::filesystem::path& path, Algorithm expected) {
  Agent a = load_agent(path);
  if (a.algorithm() != expected) {
    throw CheckpointError(path.string() + ": checkpoint is a " +
                          std::string(algorithm_tag(a.algorithm())) +
                          " agent, expected " +
                          std::string(algorithm_tag(expected)));
  }
  return a;
}

}  // namespace phaseforge
