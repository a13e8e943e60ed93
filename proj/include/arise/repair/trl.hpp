#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/diagnostic.hpp"
#include "arise/exec/validate.hpp"
#include "arise/llm/provider.hpp"

namespace arise::repair {

struct RepairAttempt {
  int iteration = 0;  // 1-based
  std::string input_script;
  std::vector<dsl::Diagnostic> diagnostics_in;
  std::string prompt_hash;
  std::string output_script;
  exec::Outcome outcome = exec::Outcome::compile_fail;
};

struct TrlOutcome {
  std::string final_script;
  bool success = false;
  std::vector<RepairAttempt> attempts;
  bool first_attempt_success = false;
  /// Diagnostics of the final script; empty on success.
  std::vector<dsl::Diagnostic> final_diagnostics;
  /// `trl.exhausted` or `trl.llm_error` when success is false.
  std::string error_code;
  std::string error_message;
};

struct TrlConfig {
  int max_iterations = 10;
  double temperature = 1.0;
  std::size_t token_budget = 8000;
  /// Stage-specific reference material appended after the diagnostics.
  std::vector<std::string> exemplars;
};

/// Section headings of the repair prompt, in the order they appear.
inline constexpr std::string_view kDescriptionHeading = "Scenario description:";
inline constexpr std::string_view kScriptHeading = "Most recent script:";
inline constexpr std::string_view kDiagnosticsHeading = "Diagnostics:";
inline constexpr std::string_view kExemplarsHeading = "Reference examples:";

/// System instructions, then one user turn holding the description, the
/// latest script, rendered diagnostics and exemplars. When the estimate
/// exceeds the budget, exemplars are dropped from the end first, then
/// trailing diagnostics (the first always stays).
llm::ChatRequest build_repair_prompt(std::string_view description, std::string_view latest_script,
                                     const std::vector<dsl::Diagnostic>& diagnostics,
                                     const std::vector<std::string>& exemplars, double temperature,
                                     std::size_t token_budget = 8000);

/// Script text from a model reply: the first fenced block, or the whole reply.
std::string extract_script(std::string_view reply);

/// Receives progress so every attempt can be persisted before the next starts.
class TrlObserver {
 public:
  virtual ~TrlObserver() = default;
  virtual void on_start(std::string_view /*script*/) {}
  virtual void on_attempt(const RepairAttempt& /*attempt*/) {}
  virtual void on_finish(const TrlOutcome& /*outcome*/) {}
};

/// Validate; on failure alternate repair prompts and validation until the
/// script passes or `max_iterations` repairs were spent. An LLM error aborts
/// the loop with `trl.llm_error`.
TrlOutcome run_trl(std::string_view script, std::string_view description, exec::Validator& validator,
                   const exec::ExecutionLimits& limits, llm::Gateway& llm, const TrlConfig& config,
                   TrlObserver* observer = nullptr);

/// Writes `attempt-0.sdsl` (the input), `attempt-<n>.sdsl` per repair,
/// `attempts.jsonl` and `final.sdsl` under one run directory.
class AttemptStore final : public TrlObserver {
 public:
  explicit AttemptStore(std::string dir);
  void on_start(std::string_view script) override;
  void on_attempt(const RepairAttempt& attempt) override;
  void on_finish(const TrlOutcome& outcome) override;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

/// Loads repair exemplars: blocks separated by lines holding only `---`.
std::vector<std::string> load_exemplars(const std::string& path);

}  // namespace arise::repair
