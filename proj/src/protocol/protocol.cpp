#include "arise/protocol/protocol.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/exec/serialize.hpp"

namespace arise::protocol {

using nlohmann::json;

std::string_view to_string(RequestKind k) {
  switch (k) {
    case RequestKind::hello: return "hello";
    case RequestKind::compile: return "compile";
    case RequestKind::execute: return "execute";
    case RequestKind::shutdown: return "shutdown";
  }
  return "?";
}

std::optional<RequestKind> request_kind_from(std::string_view s) {
  for (auto k : {RequestKind::hello, RequestKind::compile, RequestKind::execute, RequestKind::shutdown})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(ResponseStatus s) {
  switch (s) {
    case ResponseStatus::ok: return "ok";
    case ResponseStatus::success: return "success";
    case ResponseStatus::spawn_failure: return "spawn_failure";
    case ResponseStatus::runtime_error: return "runtime_error";
    case ResponseStatus::requirement_violation: return "requirement_violation";
    case ResponseStatus::protocol_error: return "protocol_error";
  }
  return "?";
}

std::optional<ResponseStatus> response_status_from(std::string_view s) {
  for (auto k : {ResponseStatus::ok, ResponseStatus::success, ResponseStatus::spawn_failure,
                 ResponseStatus::runtime_error, ResponseStatus::requirement_violation, ResponseStatus::protocol_error})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string encode(const ExecRequest& r) {
  json j = {{"kind", to_string(r.kind)}, {"id", r.id}};
  if (r.kind == RequestKind::hello) j["version"] = r.version;
  if (r.kind == RequestKind::compile || r.kind == RequestKind::execute) j["script"] = r.script;
  if (r.kind == RequestKind::execute) j["limits"] = r.limits;
  return j.dump();
}

std::string encode(const ExecResponse& r) {
  json j = {{"id", r.id}, {"status", to_string(r.status)}};
  if (!r.version.empty()) j["version"] = r.version;
  j["diagnostics"] = r.diagnostics;
  j["spawn_attempts_used"] = r.spawn_attempts_used;
  if (!r.trajectory.empty()) j["trajectory"] = r.trajectory;
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump();
}

ExecRequest decode_request(std::string_view line) {
  try {
    auto j = json::parse(line);
    ExecRequest r;
    auto kind = request_kind_from(j.at("kind").get<std::string>());
    if (!kind) throw Error("exec.protocol_error", "unknown request kind '" + j.at("kind").get<std::string>() + "'");
    r.kind = *kind;
    r.id = j.at("id").get<std::string>();
    if (r.kind == RequestKind::hello) r.version = j.at("version").get<std::string>();
    if (r.kind == RequestKind::compile || r.kind == RequestKind::execute) r.script = j.at("script").get<std::string>();
    if (r.kind == RequestKind::execute) r.limits = j.value("limits", json::object()).get<exec::ExecutionLimits>();
    return r;
  } catch (const json::exception& e) {
    throw Error("exec.protocol_error", std::string("malformed request: ") + e.what());
  }
}

ExecResponse decode_response(std::string_view line) {
  try {
    auto j = json::parse(line);
    ExecResponse r;
    r.id = j.at("id").get<std::string>();
    auto status = response_status_from(j.at("status").get<std::string>());
    if (!status) throw Error("exec.protocol_error", "unknown response status '" + j.at("status").get<std::string>() + "'");
    r.status = *status;
    r.version = j.value("version", std::string{});
    r.diagnostics = j.value("diagnostics", json::array()).get<std::vector<dsl::Diagnostic>>();
    r.spawn_attempts_used = j.value("spawn_attempts_used", 0);
    r.trajectory = j.value("trajectory", json::array()).get<std::vector<exec::ObjectSummary>>();
    r.error = j.value("error", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw Error("exec.protocol_error", std::string("malformed response: ") + e.what());
  }
}

exec::ExecutionResult to_result(const ExecResponse& r) {
  exec::ExecutionResult out;
  auto status = exec::execution_status_from(to_string(r.status));
  if (!status) throw Error("exec.protocol_error", "response status '" + std::string(to_string(r.status)) + "' is not an execution status");
  out.status = *status;
  out.spawn_attempts_used = r.spawn_attempts_used;
  out.diagnostics = r.diagnostics;
  out.trajectory_summary = r.trajectory;
  return out;
}

ExecResponse Server::handle(const ExecRequest& r, bool& done) {
  ExecResponse out;
  out.id = r.id;
  auto fail = [&](std::string message) {
    out.status = ResponseStatus::protocol_error;
    out.error = std::move(message);
    return out;
  };
  if (!greeted_ && r.kind != RequestKind::hello) return fail("hello must be the first request");
  switch (r.kind) {
    case RequestKind::hello:
      if (r.version != kVersion) return fail("unsupported protocol version '" + r.version + "'");
      greeted_ = true;
      out.version = std::string(kVersion);
      return out;
    case RequestKind::compile: {
      out.diagnostics = exec::compile_source(r.script, *maps_);
      return out;
    }
    case RequestKind::execute: {
      auto report = exec::validate_source(r.script, *maps_, r.limits);
      if (!report.execution) {
        out.diagnostics = report.compile_diagnostics;
        return out;
      }
      const auto& e = *report.execution;
      out.status = *response_status_from(exec::to_string(e.status));
      out.diagnostics = e.diagnostics;
      out.spawn_attempts_used = e.spawn_attempts_used;
      out.trajectory = e.trajectory_summary;
      return out;
    }
    case RequestKind::shutdown:
      done = true;
      return out;
  }
  return fail("unhandled request");
}

std::string Server::handle_line(std::string_view line, bool& done) {
  try {
    return encode(handle(decode_request(line), done));
  } catch (const Error& e) {
    ExecResponse r;
    try {
      r.id = json::parse(line).value("id", std::string{});
    } catch (const json::exception&) {
    }
    r.status = ResponseStatus::protocol_error;
    r.error = e.what();
    return encode(r);
  }
}

void Server::serve(std::istream& in, std::ostream& out) {
  std::string line;
  bool done = false;
  while (!done && std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(line, done) << '\n' << std::flush;
  }
}

}  // namespace arise::protocol
