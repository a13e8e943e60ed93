#include "arise/repair/trl.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/exec/serialize.hpp"
#include "arise/util/text.hpp"

namespace arise::repair {

namespace {

constexpr std::string_view kSystem =
    "You repair traffic scenario scripts written in a Scenic-like DSL. The script failed to compile or to "
    "execute in simulation. Use the diagnostics to find the faults, keep everything that matches the scenario "
    "description, and change as little as possible. Reply with the complete corrected script inside one ``` "
    "fenced block, keeping every `#-- region:` marker line.";

std::string fenced(std::string_view text) {
  std::string body(text);
  if (!body.empty() && body.back() != '\n') body.push_back('\n');
  return "```\n" + body + "```\n";
}

std::string user_turn(std::string_view description, std::string_view script,
                      const std::vector<dsl::Diagnostic>& diagnostics, std::size_t shown_diagnostics,
                      const std::vector<std::string>& exemplars, std::size_t shown_exemplars) {
  std::string out;
  out += std::string(kDescriptionHeading) + "\n" + std::string(description) + "\n\n";
  out += std::string(kScriptHeading) + "\n" + fenced(script) + "\n";
  out += std::string(kDiagnosticsHeading) + "\n";
  for (std::size_t i = 0; i < shown_diagnostics; ++i) out += dsl::render(diagnostics[i], script);
  if (shown_diagnostics < diagnostics.size())
    out += "(" + std::to_string(diagnostics.size() - shown_diagnostics) + " further diagnostics omitted)\n";
  if (shown_exemplars > 0) {
    out += "\n" + std::string(kExemplarsHeading) + "\n";
    for (std::size_t i = 0; i < shown_exemplars; ++i) out += exemplars[i] + (exemplars[i].ends_with('\n') ? "" : "\n") + "\n";
  }
  out += "\nReturn the complete corrected script.";
  return out;
}

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("io.write", "cannot append to '" + path + "'");
  out << line << '\n';
}

}  // namespace

llm::ChatRequest build_repair_prompt(std::string_view description, std::string_view latest_script,
                                     const std::vector<dsl::Diagnostic>& diagnostics,
                                     const std::vector<std::string>& exemplars, double temperature,
                                     std::size_t token_budget) {
  llm::ChatRequest r;
  r.tag = llm::Tag::repair;
  r.temperature = temperature;
  r.messages = {{llm::Role::system, std::string(kSystem)}, {llm::Role::user, ""}};
  std::size_t shown_ex = exemplars.size();
  std::size_t shown_diag = diagnostics.size();
  auto fits = [&] {
    r.messages[1].content = user_turn(description, latest_script, diagnostics, shown_diag, exemplars, shown_ex);
    return llm::approx_tokens(r) <= token_budget;
  };
  while (!fits()) {
    if (shown_ex > 0) {
      --shown_ex;
    } else if (shown_diag > 1) {
      --shown_diag;
    } else {
      break;
    }
  }
  return r;
}

std::string extract_script(std::string_view reply) {
  std::string s = util::strip_code_fence(reply);
  if (!s.empty() && s.back() != '\n') s.push_back('\n');
  return s;
}

TrlOutcome run_trl(std::string_view script, std::string_view description, exec::Validator& validator,
                   const exec::ExecutionLimits& limits, llm::Gateway& llm, const TrlConfig& config,
                   TrlObserver* observer) {
  if (config.max_iterations < 1) throw Error("trl.bad_config", "max_iterations must be at least 1");
  if (observer) observer->on_start(script);
  TrlOutcome outcome;
  auto report = validator.validate(script, limits);
  std::string current(script);
  auto finish = [&]() -> TrlOutcome {
    outcome.final_script = current;
    if (observer) observer->on_finish(outcome);
    return outcome;
  };
  if (report.passed()) {
    outcome.success = true;
    outcome.first_attempt_success = true;
    return finish();
  }
  auto diagnostics = report.diagnostics();
  for (int i = 1; i <= config.max_iterations; ++i) {
    auto request = build_repair_prompt(description, current, diagnostics, config.exemplars, config.temperature,
                                       config.token_budget);
    std::string reply;
    try {
      reply = llm.complete(request).content;
    } catch (const Error& e) {
      outcome.error_code = "trl.llm_error";
      outcome.error_message = e.what();
      outcome.final_diagnostics = diagnostics;
      return finish();
    }
    RepairAttempt attempt;
    attempt.iteration = i;
    attempt.input_script = current;
    attempt.diagnostics_in = diagnostics;
    attempt.prompt_hash = llm::request_hash(request);
    attempt.output_script = extract_script(reply);
    auto next = validator.validate(attempt.output_script, limits);
    attempt.outcome = next.outcome();
    outcome.attempts.push_back(attempt);
    if (observer) observer->on_attempt(attempt);
    current = attempt.output_script;
    diagnostics = next.diagnostics();
    if (next.passed()) {
      outcome.success = true;
      return finish();
    }
  }
  outcome.error_code = "trl.exhausted";
  outcome.error_message = "no passing script after " + std::to_string(config.max_iterations) + " repair attempts";
  outcome.final_diagnostics = diagnostics;
  return finish();
}

AttemptStore::AttemptStore(std::string dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

void AttemptStore::on_start(std::string_view script) {
  util::write_file(dir_ + "/attempt-0.sdsl", script);
  std::filesystem::remove(dir_ + "/attempts.jsonl");
  std::filesystem::remove(dir_ + "/final.sdsl");
}

void AttemptStore::on_attempt(const RepairAttempt& attempt) {
  util::write_file(dir_ + "/attempt-" + std::to_string(attempt.iteration) + ".sdsl", attempt.output_script);
  nlohmann::json j = {{"iteration", attempt.iteration},
                      {"prompt_hash", attempt.prompt_hash},
                      {"diagnostics_in", attempt.diagnostics_in},
                      {"outcome", exec::to_string(attempt.outcome)}};
  append_line(dir_ + "/attempts.jsonl", j.dump());
}

void AttemptStore::on_finish(const TrlOutcome& outcome) { util::write_file(dir_ + "/final.sdsl", outcome.final_script); }

std::vector<std::string> load_exemplars(const std::string& path) {
  std::vector<std::string> out;
  std::string block;
  auto flush = [&] {
    auto t = util::trim(block);
    if (!t.empty()) out.emplace_back(std::string(t) + "\n");
    block.clear();
  };
  for (const auto& line : util::split_lines(util::read_file(path))) {
    if (util::trim(line) == "---") {
      flush();
      continue;
    }
    block += line + "\n";
  }
  flush();
  return out;
}

}  // namespace arise::repair
