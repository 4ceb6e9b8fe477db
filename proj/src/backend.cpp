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

#include "phaseforge/backend.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "json.hpp"

extern char** environ;

namespace phaseforge {

using nlohmann::json;

Evaluation evaluate_program(const Program& p) {
  return {estimate_cycles(p), extract_features(p)};
}

Evaluation BuiltinBackend::evaluate(const Benchmark& bench,
                                    std::span<const PassId> seq) {
  return evaluate_program(apply_sequence(seq, bench.program));
}

ExternalBackend::ExternalBackend(const std::filesystem::path& executable,
                                 std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  // A dead child must surface as EPIPE on write, not kill this process.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  const std::string path = executable.string();
  char* argv[] = {const_cast<char*>(path.c_str()), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, path.c_str(), &actions, nullptr, argv,
                               environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    shutdown();
    throw BackendError("cannot start backend '" + path +
                       "': " + std::strerror(rc));
  }
  pid_ = pid;

  json reply;
  try {
    reply = json::parse(round_trip(R"({"id":0,"op":"hello"})"));
  } catch (const json::exception& e) {
    shutdown();
    throw BackendError(std::string("malformed hello response: ") + e.what());
  } catch (...) {
    shutdown();
    throw;
  }
  if (!reply.is_object() || reply.value("id", -1) != 0 ||
      reply.value("protocol", -1) != 1 ||
      reply.value("passes", -1) != static_cast<int>(kNumPasses)) {
    shutdown();
    throw BackendError("unexpected hello response: " + reply.dump());
  }
}

ExternalBackend::~ExternalBackend() { shutdown(); }

void ExternalBackend::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ExternalBackend::round_trip(const std::string& request) {
  if (to_child_ < 0) throw BackendError("backend is not running");
  std::string line = request + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    ssize_t n = ::write(to_child_, line.data() + sent, line.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("write to backend failed: ") +
                         std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      throw BackendError("backend timed out after " +
                         std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;  // re-check the deadline
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("read from backend failed: ") +
                         std::strerror(errno));
    }
    if (n == 0) throw BackendError("backend exited unexpectedly");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Evaluation ExternalBackend::evaluate(const Benchmark& bench,
                                     std::span<const PassId> seq) {
  const long id = next_id_++;
  json request = {{"id", id}, {"op", "eval"}, {"program", bench.id}};
  json passes = json::array();
  for (PassId p : seq) passes.push_back(index_of(p));
  request["passes"] = std::move(passes);

  const std::string raw = round_trip(request.dump());
  json reply;
  try {
    reply = json::parse(raw);
  } catch (const json::exception&) {
    throw BackendError("malformed backend response: " + raw);
  }
  if (!reply.is_object()) throw BackendError("malformed backend response: " + raw);
  if (reply.contains("error")) {
    throw BackendError("backend reported error: " + reply["error"].dump());
  }
  if (!reply.contains("id") || !reply["id"].is_number_integer() ||
      reply["id"].get<long>() != id) {
    throw BackendError("backend response id mismatch: " + raw);
  }
  const json& cycles = reply.contains("cycles") ? reply["cycles"] : json();
  if (!cycles.is_number_integer() || cycles.get<long long>() < 1) {
    throw BackendError("backend response lacks a positive integer 'cycles': " +
                       raw);
  }
  const json& features = reply.contains("features") ? reply["features"] : json();
  if (!features.is_array() || features.size() != kNumFeatures) {
    throw BackendError("backend response needs " +
                       std::to_string(kNumFeatures) + " features: " + raw);
  }
  Evaluation e;
  e.cycles = cycles.get<CycleCount>();
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!features[i].is_number_integer() || features[i].get<long long>() < 0) {
      throw BackendError("backend feature " + std::to_string(i) +
                         " is not a non-negative integer");
    }
    e.features[i] = features[i].get<std::int64_t>();
  }
  return e;
}

std::shared_ptr<Backend> backend_from_environment() {
  const char* setting = std::getenv("PHASEFORGE_BACKEND");
  if (setting == nullptr || std::string_view(setting).empty() ||
      std::string_view(setting) == "builtin") {
    return std::make_shared<BuiltinBackend>();
  }
  std::string_view s(setting);
  if (s.substr(0, 4) != "cmd:" || s.size() == 4) {
    throw BackendError("PHASEFORGE_BACKEND must be 'builtin' or 'cmd:<path>'");
  }
  auto timeout = kDefaultBackendTimeout;
  if (const char* t = std::getenv("PHASEFORGE_BACKEND_TIMEOUT_MS")) {
    timeout = std::chrono::milliseconds(std::atol(t));
  }
  return std::make_shared<ExternalBackend>(std::filesystem::path(s.substr(4)),
                                           timeout);
}

}  // namespace phaseforge
