#include "arise/metrics/run_log.hpp"

#include <chrono>
#include <ctime>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::metrics {

using nlohmann::json;

void to_json(json& j, const RunRecord& r) {
  j = json{{"scenario_id", r.scenario_id},
           {"category", r.category},
           {"run_index", r.run_index},
           {"first_attempt_success", r.first_attempt_success},
           {"repair_attempts", r.repair_attempts},
           {"success", r.success},
           {"diagnostics_summary", r.diagnostics_summary},
           {"error_code", r.error_code},
           {"warnings", r.warnings},
           {"timings",
            {{"extract_ms", r.timings.extract_ms},
             {"snippets_ms", r.timings.snippets_ms},
             {"repair_ms", r.timings.repair_ms},
             {"total_ms", r.timings.total_ms}}}};
}

void from_json(const json& j, RunRecord& r) {
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.category = j.at("category").get<std::string>();
  r.run_index = j.at("run_index").get<int>();
  r.first_attempt_success = j.at("first_attempt_success").get<bool>();
  r.repair_attempts = j.at("repair_attempts").get<int>();
  r.success = j.at("success").get<bool>();
  r.diagnostics_summary = j.value("diagnostics_summary", std::vector<std::string>{});
  r.error_code = j.value("error_code", std::string{});
  r.warnings = j.value("warnings", std::vector<std::string>{});
  if (j.contains("timings")) {
    const auto& t = j["timings"];
    r.timings.extract_ms = t.value("extract_ms", 0.0);
    r.timings.snippets_ms = t.value("snippets_ms", 0.0);
    r.timings.repair_ms = t.value("repair_ms", 0.0);
    r.timings.total_ms = t.value("total_ms", 0.0);
  }
}

RunLog parse_run_log(std::string_view content) {
  RunLog log;
  bool have_header = false;
  int line_no = 0;
  for (const auto& line : util::split_lines(content)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("metrics.bad_log", "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!j.is_object() || j.value("schema", "") != kRunLogSchema)
        throw Error("metrics.bad_log", "first line must be a header with schema " + std::string(kRunLogSchema));
      log.header = j;
      have_header = true;
      continue;
    }
    try {
      RunRecord r = j.get<RunRecord>();
      check(r);
      log.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error("metrics.bad_log", "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("metrics.bad_log", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error("metrics.bad_log", "run log is empty");
  return log;
}

RunLog read_run_log(const std::string& path) {
  std::string content;
  try {
    content = util::read_file(path);
  } catch (const Error& e) {
    throw Error("metrics.bad_log", e.what());
  }
  return parse_run_log(content);
}

std::string without_timestamps(std::string_view content) {
  std::string out;
  for (const auto& line : util::split_lines(content)) {
    if (util::trim(line).empty()) continue;
    auto j = json::parse(line);
    j.erase("created");
    j.erase("timings");
    out += j.dump() + "\n";
  }
  return out;
}

RunLogWriter::RunLogWriter(const std::string& path, const json& config) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw Error("io.write", "cannot create run log '" + path + "'");
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char created[32];
  std::strftime(created, sizeof created, "%Y-%m-%dT%H:%M:%SZ", &tm);
  write_line(json{{"schema", kRunLogSchema}, {"created", created}, {"config", config}}.dump());
}

RunLogWriter::~RunLogWriter() {
  if (file_) std::fclose(file_);
}

void RunLogWriter::write_line(const std::string& line) {
  std::fwrite(line.data(), 1, line.size(), file_);
  std::fputc('\n', file_);
  std::fflush(file_);
}

void RunLogWriter::submit(std::size_t sequence, const RunRecord& record) {
  std::lock_guard lock(mu_);
  pending_.emplace(sequence, record);
  while (!pending_.empty() && pending_.begin()->first == next_) {
    write_line(json(pending_.begin()->second).dump());
    pending_.erase(pending_.begin());
    ++next_;
  }
}

std::size_t RunLogWriter::written() const {
  std::lock_guard lock(mu_);
  return next_;
}

}  // namespace arise::metrics
