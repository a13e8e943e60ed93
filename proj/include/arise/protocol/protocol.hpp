#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/diagnostic.hpp"
#include "arise/exec/executor.hpp"
#include "arise/exec/validate.hpp"

namespace arise::protocol {

inline constexpr std::string_view kVersion = "arise-exec/1";

enum class RequestKind { hello, compile, execute, shutdown };
std::string_view to_string(RequestKind k);
std::optional<RequestKind> request_kind_from(std::string_view s);

struct ExecRequest {
  RequestKind kind = RequestKind::hello;
  std::string id;
  std::string version;  // hello only
  std::string script;   // compile and execute
  exec::ExecutionLimits limits;  // execute
};

/// `ok` and `protocol_error` plus every execution status.
enum class ResponseStatus { ok, success, spawn_failure, runtime_error, requirement_violation, protocol_error };
std::string_view to_string(ResponseStatus s);
std::optional<ResponseStatus> response_status_from(std::string_view s);

struct ExecResponse {
  std::string id;
  ResponseStatus status = ResponseStatus::ok;
  std::string version;  // hello only
  std::vector<dsl::Diagnostic> diagnostics;
  int spawn_attempts_used = 0;
  std::vector<exec::ObjectSummary> trajectory;  // execute only
  std::string error;                            // protocol_error only
};

/// One JSON object per line, no trailing newline.
std::string encode(const ExecRequest& r);
std::string encode(const ExecResponse& r);
/// Throw `exec.protocol_error` on malformed input.
ExecRequest decode_request(std::string_view line);
ExecResponse decode_response(std::string_view line);

/// Server side: answers requests with the builtin executor.
class Server {
 public:
  explicit Server(std::shared_ptr<const exec::MapSet> maps) : maps_(std::move(maps)) {}
  /// Handles one raw line. `done` turns true after shutdown.
  std::string handle_line(std::string_view line, bool& done);
  /// Loop over a stream until shutdown or end of input.
  void serve(std::istream& in, std::ostream& out);

 private:
  ExecResponse handle(const ExecRequest& r, bool& done);
  std::shared_ptr<const exec::MapSet> maps_;
  bool greeted_ = false;
};

/// ExecutionResult carried by an execute response.
exec::ExecutionResult to_result(const ExecResponse& r);

}  // namespace arise::protocol
