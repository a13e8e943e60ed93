#include "arise/protocol/session.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "arise/error.hpp"

namespace arise::protocol {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

Session::Session(SessionConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) throw Error("exec.bridge_crash", "empty executor command");
  spawn();
  ExecRequest hello;
  hello.kind = RequestKind::hello;
  hello.version = std::string(kVersion);
  auto r = call(hello);
  if (r.status != ResponseStatus::ok || r.version != kVersion) {
    kill_child();
    throw Error("exec.protocol_error", "executor rejected protocol " + std::string(kVersion) +
                                           (r.version.empty() ? "" : " (speaks " + r.version + ")") +
                                           (r.error.empty() ? "" : ": " + r.error));
  }
}

Session::~Session() {
  try {
    close();
  } catch (...) {
    kill_child();
  }
}

void Session::spawn() {
  int in[2], out[2];
  if (::pipe2(in, O_CLOEXEC) != 0) throw Error("exec.bridge_crash", std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw Error("exec.bridge_crash", std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> argv;
  for (auto& a : config_.command) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = ::fork();
  if (pid < 0) throw Error("exec.bridge_crash", std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
}

void Session::kill_child() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

void Session::send_line(const std::string& line) {
  std::string data = line + '\n';
  const char* p = data.data();
  size_t left = data.size();
  // A dead reader must surface as an error, not SIGPIPE.
  struct sigaction ignore {}, previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);
  while (left > 0) {
    ssize_t n = ::write(to_child_, p, left);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::sigaction(SIGPIPE, &previous, nullptr);
      kill_child();
      throw Error("exec.bridge_crash", "executor closed its input");
    }
    p += n;
    left -= static_cast<size_t>(n);
  }
  ::sigaction(SIGPIPE, &previous, nullptr);
}

std::string Session::read_line() {
  using clock = std::chrono::steady_clock;
  auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(config_.timeout_s));
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      kill_child();
      throw Error("exec.bridge_timeout", "executor did not answer within " + std::to_string(config_.timeout_s) + " s");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(left));
    if (rc < 0 && errno == EINTR) continue;
    if (rc == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      kill_child();
      throw Error("exec.bridge_crash", "executor exited unexpectedly");
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

ExecResponse Session::call(ExecRequest request) {
  if (pid_ <= 0) throw Error("exec.bridge_crash", "executor is not running");
  request.id = std::to_string(++next_id_);
  send_line(encode(request));
  std::string line = read_line();
  ExecResponse r;
  try {
    r = decode_response(line);
  } catch (const Error&) {
    kill_child();
    throw;
  }
  if (r.id != request.id) {
    kill_child();
    throw Error("exec.protocol_error", "response id '" + r.id + "' does not match request '" + request.id + "'");
  }
  if (r.status == ResponseStatus::protocol_error && request.kind != RequestKind::hello)
    throw Error("exec.protocol_error", "executor: " + r.error);
  return r;
}

void Session::close() {
  if (pid_ <= 0) return;
  try {
    ExecRequest bye;
    bye.kind = RequestKind::shutdown;
    call(bye);
  } catch (const Error&) {
  }
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) ::waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

exec::ValidationReport BridgeValidator::validate(std::string_view source, const exec::ExecutionLimits& limits) {
  if (!session_ || !session_->alive()) session_ = std::make_unique<Session>(config_);
  exec::ValidationReport report;
  ExecRequest compile;
  compile.kind = RequestKind::compile;
  compile.script = std::string(source);
  report.compile_diagnostics = session_->call(compile).diagnostics;
  if (!report.compile_diagnostics.empty()) return report;
  ExecRequest run = compile;
  run.kind = RequestKind::execute;
  run.limits = limits;
  auto r = session_->call(run);
  if (r.status == ResponseStatus::ok)
    throw Error("exec.protocol_error", "executor reported compile diagnostics only at execute time");
  report.execution = to_result(r);
  return report;
}

}  // namespace arise::protocol
