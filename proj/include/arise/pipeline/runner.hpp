#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arise/exec/validate.hpp"
#include "arise/kb/knowledge_base.hpp"
#include "arise/llm/provider.hpp"
#include "arise/metrics/run_log.hpp"
#include "arise/pipeline/scenario.hpp"
#include "arise/pipeline/snippets.hpp"

namespace arise::pipeline {

struct RunnerConfig {
  double temperature = 1.0;
  std::size_t top_k = 2;
  int max_repairs = 10;
  int spawn_attempts = 15;
  int runs = 50;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;  // empty: do not persist scripts
};

/// Shared, read-only inputs of every run.
struct Resources {
  std::shared_ptr<const kb::KnowledgeBase> kb;
  std::shared_ptr<const exec::MapSet> maps;
  Defaults defaults;
  std::vector<std::string> repair_exemplars;
};

/// Executor seed of one run, derived from the batch seed, scenario and run index.
std::uint64_t run_seed(std::uint64_t base, std::string_view scenario_id, int run_index);

/// Modules A-C then the repair loop for one prompt. Never throws for
/// generation failures: they are recorded in the returned record.
struct RunOutput {
  metrics::RunRecord record;
  std::string final_script;
  bool infrastructure_error = false;  // LLM or executor-bridge failure
};
RunOutput run_scenario(const ScenarioPrompt& prompt, int run_index, llm::Gateway& llm, exec::Validator& validator,
                       const Resources& resources, const RunnerConfig& config);

using ValidatorFactory = std::function<std::unique_ptr<exec::Validator>()>;

struct BatchResult {
  std::vector<metrics::RunRecord> records;  // in (prompt, run) order
  int infrastructure_errors = 0;
};

/// Runs `config.runs` executions of each prompt on `config.workers` threads,
/// each with its own validator. Records reach `log` in (prompt, run) order.
BatchResult run_batch(const std::vector<ScenarioPrompt>& prompts, llm::Gateway& llm, const ValidatorFactory& validators,
                      const Resources& resources, const RunnerConfig& config, metrics::RunLogWriter* log = nullptr);

}  // namespace arise::pipeline
