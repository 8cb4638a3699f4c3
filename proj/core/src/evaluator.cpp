// Copyright 2026 The molso Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "molso/evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <thread>

#include "molso/error.hpp"

extern char** environ;

namespace molso {
namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction current{};
    sigaction(SIGPIPE, nullptr, &current);
    if (current.sa_handler == SIG_DFL) {
      struct sigaction ignore{};
      ignore.sa_handler = SIG_IGN;
      sigemptyset(&ignore.sa_mask);
      sigaction(SIGPIPE, &ignore, nullptr);
    }
  });
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  bool open() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

// Owns the child process group; kills it and reaps the leader unless the
// leader was waited for.
class Child {
 public:
  explicit Child(pid_t pid) : pid_(pid) {}
  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;
  ~Child() {
    if (pid_ > 0) {
      ::kill(-pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  // Waits until `deadline`; returns the wait status or nullopt on timeout.
  std::optional<int> wait_until(Clock::time_point deadline) {
    while (true) {
      int status = 0;
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        return status;
      }
      if (r < 0 && errno != EINTR) {
        pid_ = -1;
        return std::nullopt;
      }
      if (Clock::now() >= deadline) return std::nullopt;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }

 private:
  pid_t pid_;
};

void set_nonblocking(int fd) {
  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

struct Collector {
  std::size_t first_id;
  std::size_t width;
  std::vector<std::vector<double>> scores;
  std::vector<bool> seen;

  std::optional<std::size_t> first_missing() const {
    auto it = std::find(seen.begin(), seen.end(), false);
    if (it == seen.end()) return std::nullopt;
    return first_id + static_cast<std::size_t>(it - seen.begin());
  }

  void accept(const std::string& line) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) return;
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("malformed evaluator response: " + line.substr(0, 200), first_missing());
    }
    if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_number_integer() ||
        !msg.contains("f") || !msg["f"].is_array()) {
      throw ProtocolError(
          "evaluator response lacks integer 'id' or array 'f': " + line.substr(0, 200),
          first_missing());
    }
    const auto id = msg["id"].get<long long>();
    if (id < static_cast<long long>(first_id) ||
        id >= static_cast<long long>(first_id + seen.size())) {
      throw ProtocolError("evaluator answered unknown id " + std::to_string(id), first_missing());
    }
    const auto local = static_cast<std::size_t>(id) - first_id;
    if (seen[local]) {
      throw ProtocolError("evaluator answered id " + std::to_string(id) + " twice",
                          static_cast<std::size_t>(id));
    }
    const auto& f = msg["f"];
    if (f.size() < width) {
      throw ProtocolError("evaluator returned " + std::to_string(f.size()) + " scores, expected " +
                              std::to_string(width),
                          static_cast<std::size_t>(id));
    }
    std::vector<double> values;
    values.reserve(f.size());
    for (const auto& v : f) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw EvaluationError("evaluator returned a non-finite score",
                              static_cast<std::size_t>(id));
      }
      values.push_back(v.get<double>());
    }
    scores[local] = std::move(values);
    seen[local] = true;
  }
};

}  // namespace

std::vector<std::vector<double>> run_external_evaluator(const std::string& command,
                                                        std::span<const Point> points,
                                                        std::size_t width,
                                                        std::chrono::milliseconds timeout,
                                                        std::size_t first_id) {
  if (points.empty()) return {};
  ignore_sigpipe();

  std::string requests;
  for (std::size_t i = 0; i < points.size(); ++i) {
    nlohmann::json msg = {{"id", first_id + i}, {"x", points[i]}};
    requests += msg.dump();
    requests += '\n';
  }

  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw EvaluationError("pipe() failed");
  Fd child_stdin_read(to_child[0]);
  Fd child_stdin(to_child[1]);
  if (::pipe2(from_child, O_CLOEXEC) != 0) throw EvaluationError("pipe() failed");
  Fd child_stdout(from_child[0]);
  Fd child_stdout_write(from_child[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_stdin_read.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_stdout_write.get(), STDOUT_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc =
      ::posix_spawn(&pid, "/bin/sh", &actions, &attr, const_cast<char* const*>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw EvaluationError("cannot launch evaluator '" + command + "': " + std::strerror(rc),
                          first_id);
  }
  Child child(pid);
  child_stdin_read.reset();
  child_stdout_write.reset();
  set_nonblocking(child_stdin.get());
  set_nonblocking(child_stdout.get());

  Collector collector{first_id, width, std::vector<std::vector<double>>(points.size()),
                      std::vector<bool>(points.size(), false)};
  const auto deadline = Clock::now() + timeout;
  std::size_t written = 0;
  std::string pending;
  char buffer[1 << 16];

  while (child_stdout.open()) {
    if (child_stdin.open() && written == requests.size()) child_stdin.reset();

    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {child_stdout.get(), POLLIN, 0};
    if (child_stdin.open()) fds[count++] = {child_stdin.get(), POLLOUT, 0};

    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      throw EvaluationError("evaluator '" + command + "' timed out", collector.first_missing());
    }
    const int ready = ::poll(fds, count, static_cast<int>(std::min<long long>(left, 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw EvaluationError("poll() failed while talking to the evaluator");
    }
    if (ready == 0) continue;

    if (count == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n =
          ::write(child_stdin.get(), requests.data() + written, requests.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        child_stdin.reset();  // child stopped reading; its exit status decides
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::read(child_stdout.get(), buffer, sizeof buffer);
      if (n > 0) {
        pending.append(buffer, static_cast<std::size_t>(n));
        std::size_t start = 0;
        for (auto nl = pending.find('\n'); nl != std::string::npos;
             nl = pending.find('\n', start)) {
          collector.accept(pending.substr(start, nl - start));
          start = nl + 1;
        }
        pending.erase(0, start);
      } else if (n == 0) {
        child_stdout.reset();
      } else if (errno != EAGAIN && errno != EINTR) {
        child_stdout.reset();
      }
    }
  }
  child_stdin.reset();
  if (!pending.empty()) collector.accept(pending);

  const auto status = child.wait_until(deadline);
  if (!status) {
    throw EvaluationError("evaluator '" + command + "' did not exit before the timeout",
                          collector.first_missing());
  }
  if (WIFSIGNALED(*status)) {
    throw EvaluationError(
        "evaluator '" + command + "' was killed by signal " + std::to_string(WTERMSIG(*status)),
        collector.first_missing());
  }
  if (WIFEXITED(*status) && WEXITSTATUS(*status) != 0) {
    throw EvaluationError(
        "evaluator '" + command + "' exited with status " + std::to_string(WEXITSTATUS(*status)),
        collector.first_missing());
  }
  if (auto missing = collector.first_missing()) {
    throw ProtocolError("evaluator '" + command + "' left a request unanswered", missing);
  }
  return std::move(collector.scores);
}

}  // namespace molso
