#pragma once

#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "arise/metrics/metrics.hpp"

namespace arise::metrics {

inline constexpr std::string_view kRunLogSchema = "arise-runlog/1";

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

struct RunLog {
  nlohmann::json header;  // {"schema", "created", "config"}
  std::vector<RunRecord> records;
};

/// Throws `metrics.bad_log` for a missing or foreign schema header or a
/// malformed record line.
RunLog parse_run_log(std::string_view content);
RunLog read_run_log(const std::string& path);

/// Log content with wall-clock fields (`created`, `timings`) removed, for
/// comparing two runs.
std::string without_timestamps(std::string_view content);

/// Append-only run log. Records are submitted with a sequence number from
/// any thread and written in sequence order, each line flushed on write.
class RunLogWriter {
 public:
  RunLogWriter(const std::string& path, const nlohmann::json& config);
  ~RunLogWriter();
  RunLogWriter(const RunLogWriter&) = delete;
  RunLogWriter& operator=(const RunLogWriter&) = delete;

  void submit(std::size_t sequence, const RunRecord& record);
  /// Records written so far.
  std::size_t written() const;

 private:
  void write_line(const std::string& line);

  std::FILE* file_ = nullptr;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  std::map<std::size_t, RunRecord> pending_;
};

}  // namespace arise::metrics
