#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arise/exec/validate.hpp"
#include "arise/protocol/protocol.hpp"

namespace arise::protocol {

struct SessionConfig {
  std::vector<std::string> command;  // argv of the executor process
  double timeout_s = 120.0;          // per response
};

/// A child executor process spoken to over stdin/stdout. Failures throw
/// `exec.bridge_timeout`, `exec.bridge_crash` or `exec.protocol_error`.
class Session {
 public:
  /// Spawns the process and performs the hello handshake.
  explicit Session(SessionConfig config);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  ExecResponse call(ExecRequest request);
  /// Sends shutdown and reaps the child. Safe to call twice.
  void close();
  bool alive() const { return pid_ > 0; }

 private:
  void spawn();
  void kill_child();
  void send_line(const std::string& line);
  std::string read_line();

  SessionConfig config_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  unsigned long next_id_ = 0;
};

/// Validator that compiles and executes through a Session. A crashed or hung
/// child is replaced on the next call; the failing call still throws.
class BridgeValidator final : public exec::Validator {
 public:
  explicit BridgeValidator(SessionConfig config) : config_(std::move(config)) {}
  exec::ValidationReport validate(std::string_view source, const exec::ExecutionLimits& limits) override;

 private:
  SessionConfig config_;
  std::unique_ptr<Session> session_;
};

}  // namespace arise::protocol
