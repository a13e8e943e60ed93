#include "arise/pipeline/runner.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "arise/error.hpp"
#include "arise/pipeline/extract.hpp"
#include "arise/repair/trl.hpp"
#include "arise/util/hash.hpp"

namespace arise::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

bool is_infrastructure(std::string_view code) {
  return code.rfind("llm.", 0) == 0 || code == "trl.llm_error" || code.rfind("exec.bridge", 0) == 0 ||
         code == "exec.protocol_error";
}

}  // namespace

std::uint64_t run_seed(std::uint64_t base, std::string_view scenario_id, int run_index) {
  std::string key = std::to_string(base) + '\0' + std::string(scenario_id) + '\0' + std::to_string(run_index);
  return util::fnv1a64(key);
}

RunOutput run_scenario(const ScenarioPrompt& prompt, int run_index, llm::Gateway& llm, exec::Validator& validator,
                       const Resources& resources, const RunnerConfig& config) {
  RunOutput out;
  auto& rec = out.record;
  rec.scenario_id = prompt.id;
  rec.category = prompt.category;
  rec.run_index = run_index;
  auto start = Clock::now();
  auto fail = [&](const Error& e) {
    rec.error_code = e.code();
    rec.diagnostics_summary = {e.what()};
    out.infrastructure_error = is_infrastructure(e.code());
  };
  try {
    auto t = Clock::now();
    auto decomposition = extract_components(prompt, llm, config.temperature);
    rec.timings.extract_ms = ms_since(t);

    t = Clock::now();
    auto snippets = generate_snippets(decomposition, *resources.kb, llm, config.top_k, config.temperature);
    for (const auto& region : snippets.fallbacks) rec.warnings.push_back("snippet.fallback_used:" + region);
    auto script = assemble(snippets.snippets, resources.defaults, default_map(prompt.category));
    rec.timings.snippets_ms = ms_since(t);

    t = Clock::now();
    exec::ExecutionLimits limits;
    limits.max_spawn_attempts = config.spawn_attempts;
    limits.seed = run_seed(config.seed, prompt.id, run_index);
    repair::TrlConfig trl;
    trl.max_iterations = config.max_repairs;
    trl.temperature = config.temperature;
    trl.exemplars = resources.repair_exemplars;
    std::unique_ptr<repair::AttemptStore> store;
    if (!config.out_dir.empty())
      store = std::make_unique<repair::AttemptStore>(config.out_dir + "/" + prompt.id + "/" + std::to_string(run_index));
    auto outcome = repair::run_trl(script, prompt.text, validator, limits, llm, trl, store.get());
    rec.timings.repair_ms = ms_since(t);

    rec.success = outcome.success;
    rec.first_attempt_success = outcome.first_attempt_success;
    rec.repair_attempts = static_cast<int>(outcome.attempts.size());
    rec.error_code = outcome.error_code;
    for (const auto& d : outcome.final_diagnostics) rec.diagnostics_summary.push_back(d.code);
    if (outcome.error_code == "trl.llm_error") {
      rec.diagnostics_summary.push_back(outcome.error_message);
      out.infrastructure_error = true;
    }
    out.final_script = outcome.final_script;
  } catch (const Error& e) {
    fail(e);
  }
  rec.timings.total_ms = ms_since(start);
  return out;
}

BatchResult run_batch(const std::vector<ScenarioPrompt>& prompts, llm::Gateway& llm, const ValidatorFactory& validators,
                      const Resources& resources, const RunnerConfig& config, metrics::RunLogWriter* log) {
  const std::size_t runs = static_cast<std::size_t>(std::max(0, config.runs));
  const std::size_t total = prompts.size() * runs;
  BatchResult result;
  result.records.resize(total);
  std::atomic<std::size_t> next{0};
  std::atomic<int> infra{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    try {
      auto validator = validators();
      while (true) {
        auto i = next.fetch_add(1);
        if (i >= total) break;
        const auto& prompt = prompts[i / runs];
        auto out = run_scenario(prompt, static_cast<int>(i % runs), llm, *validator, resources, config);
        if (out.infrastructure_error) ++infra;
        result.records[i] = out.record;
        if (log) log->submit(i, out.record);
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next = total;
    }
  };
  int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(total, 1))));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  result.infrastructure_errors = infra;
  return result;
}

}  // namespace arise::pipeline
