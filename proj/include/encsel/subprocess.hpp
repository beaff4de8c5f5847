#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <optional>
#include <string>

namespace encsel {

struct ProcessResult {
  bool started = false;
  bool timed_out = false;  // terminated by us at the deadline
  bool killed = false;     // needed SIGKILL after the grace period
  int exit_code = -1;      // valid when exited normally
  int term_signal = 0;
  std::string output;      // stdout and stderr interleaved
  double wall_s = 0.0;
};

// Runs `command` through /bin/sh in its own process group. At `timeout_s`
// the group receives SIGTERM; if still alive `grace_s` later, SIGKILL.
inline ProcessResult run_shell(const std::string& command, double timeout_s, double grace_s) {
  using clock = std::chrono::steady_clock;
  ProcessResult result;
  int pipe_fd[2];
  if (pipe(pipe_fd) != 0) return result;

  auto start = clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    return result;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipe_fd[1], STDOUT_FILENO);
    dup2(pipe_fd[1], STDERR_FILENO);
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  result.started = true;
  close(pipe_fd[1]);
  fcntl(pipe_fd[0], F_SETFL, fcntl(pipe_fd[0], F_GETFL) | O_NONBLOCK);

  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
  bool term_sent = false;
  bool pipe_open = true;
  int status = 0;
  bool reaped = false;
  char buf[4096];

  while (!reaped) {
    double now = elapsed();
    if (!term_sent && now >= timeout_s) {
      kill(-pid, SIGTERM);
      term_sent = true;
      result.timed_out = true;
    }
    if (term_sent && !result.killed && now >= timeout_s + grace_s) {
      kill(-pid, SIGKILL);
      result.killed = true;
    }
    if (pipe_open) {
      pollfd pfd{pipe_fd[0], POLLIN, 0};
      int wait_ms = 20;
      if (poll(&pfd, 1, wait_ms) > 0) {
        ssize_t got = read(pipe_fd[0], buf, sizeof(buf));
        if (got > 0) {
          result.output.append(buf, static_cast<std::size_t>(got));
        } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
          pipe_open = false;
        }
      }
    } else {
      usleep(5000);
    }
    pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) reaped = true;
  }
  result.wall_s = elapsed();
  // Drain anything left in the pipe; kill stray group members holding it open.
  kill(-pid, SIGKILL);
  while (true) {
    ssize_t got = read(pipe_fd[0], buf, sizeof(buf));
    if (got <= 0) break;
    result.output.append(buf, static_cast<std::size_t>(got));
  }
  close(pipe_fd[0]);

  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.term_signal = WTERMSIG(status);
  return result;
}

}  // namespace encsel
