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

// Cost backends. The builtin backend applies passes in process and scores
// them with the static cycle model; the external backend forwards each query
// to a child process speaking JSON lines on stdin/stdout:
//
//   -> {"id":0,"op":"hello"}
//   <- {"id":0,"protocol":1,"passes":12}
//   -> {"id":N,"op":"eval","program":"<id>","passes":[4,0,1]}
//   <- {"id":N,"cycles":123,"features":[56 ints]}

#ifndef PHASEFORGE_BACKEND_HPP_
#define PHASEFORGE_BACKEND_HPP_

#include <chrono>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseforge/cost_model.hpp"
#include "phaseforge/features.hpp"
#include "phaseforge/ir.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge {

struct Benchmark {
  std::string id;
  std::filesystem::path path;
  Program program;
};

struct Evaluation {
  CycleCount cycles = 0;
  FeatureVector features{};
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Cost and features of `bench` after applying `seq` to its program.
  virtual Evaluation evaluate(const Benchmark& bench,
                              std::span<const PassId> seq) = 0;

  // In-process backends score programs directly, which lets callers apply
  // passes incrementally instead of replaying whole sequences.
  virtual bool in_process() const { return false; }
};

Evaluation evaluate_program(const Program& p);

class BuiltinBackend : public Backend {
 public:
  Evaluation evaluate(const Benchmark& bench,
                      std::span<const PassId> seq) override;
  bool in_process() const override { return true; }
};

// Launches `executable` (no shell) and performs the hello handshake. One
// request is in flight at a time. Any protocol violation, child exit or
// timeout throws BackendError.
class ExternalBackend : public Backend {
 public:
  ExternalBackend(const std::filesystem::path& executable,
                  std::chrono::milliseconds timeout);
  ~ExternalBackend() override;
  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  Evaluation evaluate(const Benchmark& bench,
                      std::span<const PassId> seq) override;

 private:
  std::string round_trip(const std::string& request);
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
  long next_id_ = 1;
};

inline constexpr std::chrono::milliseconds kDefaultBackendTimeout{60000};

// Reads PHASEFORGE_BACKEND ("builtin" or "cmd:<path>") and
// PHASEFORGE_BACKEND_TIMEOUT_MS. Unset means builtin.
std::shared_ptr<Backend> backend_from_environment();

}  // namespace phaseforge

#endif  // PHASEFORGE_BACKEND_HPP_
