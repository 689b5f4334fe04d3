/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// External metric plug-ins (FID, LPIPS and friends).
//
// A plug-in is a shell command. It is invoked as
//
//     <command> <gt_dir> <out_dir>
//
// where both directories hold <image_id>.png files for the same ids, and must
// print exactly one JSON object on standard output:
//
//     {"scalar": 30.69}                       set-level value (FID style)
//     {"per_image": {"img1": 0.12, ...}}      one value per id (LPIPS style)
//
// A nonzero exit status, unparseable output or an id mismatch is a
// PluginError carrying an excerpt of what the plug-in printed.

#ifndef XINPAINT_PLUGIN_HPP_
#define XINPAINT_PLUGIN_HPP_

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "xinpaint/core/error.hpp"

namespace xinpaint {

struct ProcessResult {
  int exit_status = -1;  // valid when !signaled
  bool signaled = false;
  int signal = 0;
  std::string out;
  std::string err;

  bool ok() const { return !signaled && exit_status == 0; }
};

namespace process_detail {

inline void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace process_detail

// Runs argv[0] (looked up on PATH) with the given arguments, capturing
// standard output and standard error. Standard input is /dev/null.
inline ProcessResult run_process(const std::vector<std::string>& argv) {
  if (argv.empty()) throw InvalidArgument("run_process: empty argv");
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe(out_pipe) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(err_pipe) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    throw Error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    ::execvp(args[0], args.data());
    const char msg[] = "exec failed\n";
    [[maybe_unused]] auto n = ::write(STDERR_FILENO, msg, sizeof msg - 1);
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ProcessResult result;
  int fds[2] = {out_pipe[0], err_pipe[0]};
  std::string* sinks[2] = {&result.out, &result.err};
  char buf[4096];
  while (fds[0] >= 0 || fds[1] >= 0) {
    pollfd pfds[2];
    nfds_t count = 0;
    int which[2];
    for (int i = 0; i < 2; ++i) {
      if (fds[i] >= 0) {
        pfds[count] = {fds[i], POLLIN, 0};
        which[count++] = i;
      }
    }
    if (::poll(pfds, count, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t k = 0; k < count; ++k) {
      if (!(pfds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const int i = which[k];
      const ssize_t n = ::read(fds[i], buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        process_detail::close_fd(fds[i]);
      }
    }
  }
  process_detail::close_fd(fds[0]);
  process_detail::close_fd(fds[1]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.signal = WTERMSIG(status);
  } else {
    result.exit_status = WEXITSTATUS(status);
  }
  return result;
}

// Output of one plug-in invocation: exactly one of the two is set.
struct PluginResult {
  std::string name;
  std::optional<double> scalar;
  std::map<std::string, double> per_image;

  bool is_scalar() const { return scalar.has_value(); }
};

inline std::string excerpt(const std::string& text, std::size_t limit = 240) {
  std::string s = text.substr(0, limit);
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  if (text.size() > limit) s += "...";
  return s;
}

// Parses a plug-in's standard output.
inline PluginResult parse_plugin_output(const std::string& name,
                                        const std::string& stdout_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(stdout_text);
  } catch (const nlohmann::json::exception&) {
    throw PluginError(name, "unparseable output (expected one JSON object)",
                      excerpt(stdout_text));
  }
  if (!j.is_object()) {
    throw PluginError(name, "output is not a JSON object", excerpt(stdout_text));
  }
  const bool has_scalar = j.contains("scalar");
  const bool has_per_image = j.contains("per_image");
  if (has_scalar == has_per_image) {
    throw PluginError(name,
                      "output must contain exactly one of \"scalar\" or "
                      "\"per_image\"",
                      excerpt(stdout_text));
  }
  PluginResult result;
  result.name = name;
  if (has_scalar) {
    if (!j["scalar"].is_number()) {
      throw PluginError(name, "\"scalar\" is not a number", excerpt(stdout_text));
    }
    result.scalar = j["scalar"].get<double>();
    return result;
  }
  const nlohmann::json& per = j["per_image"];
  if (!per.is_object()) {
    throw PluginError(name, "\"per_image\" is not an object", excerpt(stdout_text));
  }
  for (const auto& [id, v] : per.items()) {
    if (!v.is_number()) {
      throw PluginError(name, "value for '" + id + "' is not a number",
                        excerpt(stdout_text));
    }
    result.per_image[id] = v.get<double>();
  }
  return result;
}

// Invokes `command <gt_dir> <out_dir>` through /bin/sh, so the command may
// carry its own arguments.
inline PluginResult run_plugin_metric(const std::string& name,
                                      const std::string& command,
                                      const std::string& gt_dir,
                                      const std::string& out_dir) {
  if (command.empty()) throw PluginError(name, "empty command", "");
  const ProcessResult proc = run_process(
      {"/bin/sh", "-c", command + " \"$@\"", "xinpaint-plugin", gt_dir, out_dir});
  if (!proc.ok()) {
    const std::string why =
        proc.signaled ? "killed by signal " + std::to_string(proc.signal)
                      : "exited with status " + std::to_string(proc.exit_status);
    throw PluginError(name, why, excerpt(proc.out + proc.err));
  }
  return parse_plugin_output(name, proc.out);
}

// Checks that a per-image result covers exactly the expected ids.
inline void check_plugin_ids(const PluginResult& result,
                             const std::set<std::string>& expected) {
  if (result.is_scalar()) return;
  std::vector<std::string> missing;
  std::vector<std::string> unexpected;
  for (const std::string& id : expected) {
    if (!result.per_image.contains(id)) missing.push_back(id);
  }
  for (const auto& [id, _] : result.per_image) {
    if (!expected.contains(id)) unexpected.push_back(id);
  }
  if (missing.empty() && unexpected.empty()) return;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < 5; ++i) s += (i ? ", " : "") + v[i];
    if (v.size() > 5) s += ", ...";
    return s;
  };
  std::string msg = "id mismatch:";
  if (!missing.empty()) msg += " missing [" + join(missing) + "]";
  if (!unexpected.empty()) msg += " unexpected [" + join(unexpected) + "]";
  nlohmann::json echo = nlohmann::json::object();
  for (const auto& [id, v] : result.per_image) echo[id] = v;
  throw PluginError(result.name, msg,
                    excerpt(nlohmann::json{{"per_image", echo}}.dump()));
}

}  // namespace xinpaint

#endif  // XINPAINT_PLUGIN_HPP_
