#include "arise/cli/cli.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "arise/dsl/diagnostic.hpp"
#include "arise/error.hpp"
#include "arise/eval/evaluator.hpp"
#include "arise/exec/validate.hpp"
#include "arise/kb/knowledge_base.hpp"
#include "arise/llm/provider.hpp"
#include "arise/metrics/metrics.hpp"
#include "arise/metrics/run_log.hpp"
#include "arise/offline/heuristic.hpp"
#include "arise/offline/oracle.hpp"
#include "arise/pipeline/runner.hpp"
#include "arise/protocol/session.hpp"
#include "arise/repair/trl.hpp"
#include "arise/util/text.hpp"

namespace arise::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string data(const std::string& rel) { return std::string(ARISE_DATA_DIR) + "/" + rel; }

struct ProviderOptions {
  std::string kind = "heuristic";
  std::string endpoint;
  std::string model;
  std::string api_key_env;
  std::string fixtures = data("fixtures");
  std::string record;
  double timeout_s = 60;
  int max_retries = 3;
  int concurrency = 4;
  std::string mock_reference;
  std::string mock_scores;
};

struct ExecutorOptions {
  std::string kind = "builtin";
  std::string command;
  double timeout_s = 120;
};

struct GenerateOptions {
  ProviderOptions provider;
  ExecutorOptions executor;
  double temperature = llm::kDefaultTemperature;
  std::size_t top_k = 2;
  int max_repairs = 10;
  int spawn_attempts = 15;
  int runs = 50;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string kb = data("kb/knowledge_base.jsonl");
  std::string kb_cache;
  std::string maps = data("maps");
  std::string prompts = data("prompts/scenarios.jsonl");
  std::string defaults = data("pipeline/defaults.sdsl");
  std::string repair_examples = data("pipeline/repair_examples.txt");
  std::string out = "arise-out";
  std::vector<std::string> scenarios;
  std::vector<std::string> categories;
  int per_category = 0;
  bool save_scripts = true;
};

struct MetricsOptions {
  std::string log;
  std::string scs;
  bool json = false;
};

struct EvalOptions {
  ProviderOptions provider;
  std::string pairs;
  int repeat = 1;
  double temperature = llm::kDefaultTemperature;
  std::string material = data("eval");
  std::string out;
};

struct RepairOptions {
  ProviderOptions provider;
  ExecutorOptions executor;
  std::string script;
  std::string description;
  std::string description_file;
  std::string out = "arise-repair";
  int max_repairs = 10;
  int spawn_attempts = 15;
  std::uint64_t seed = 0;
  double temperature = llm::kDefaultTemperature;
  std::string maps = data("maps");
  std::string repair_examples = data("pipeline/repair_examples.txt");
};

struct KbOptions {
  std::string kb = data("kb/knowledge_base.jsonl");
};

struct Options {
  GenerateOptions generate;
  MetricsOptions metrics;
  EvalOptions eval;
  RepairOptions repair;
  KbOptions kb;
  bool dump_config = false;
};

const std::vector<std::string> kProviderKinds = {"heuristic", "replay", "mock", "openai_compatible", "gemini", "deepseek"};

void add_provider_options(CLI::App* app, ProviderOptions& o) {
  app->add_option("--provider", o.kind, "LLM provider kind")
      ->check(CLI::IsMember(kProviderKinds))
      ->capture_default_str();
  app->add_option("--endpoint", o.endpoint, "Base URL of a remote provider (default per kind)");
  app->add_option("--model", o.model, "Model name (default per kind)");
  app->add_option("--api-key-env", o.api_key_env,
                  "Environment variable holding the provider credential (default per kind)");
  app->add_option("--fixtures", o.fixtures, "Replay fixture directory")->capture_default_str();
  app->add_option("--record", o.record, "Record every LLM exchange as a replay fixture in this directory");
  app->add_option("--timeout", o.timeout_s, "Remote request timeout in seconds")->capture_default_str();
  app->add_option("--max-retries", o.max_retries, "Retries for transient remote failures")->capture_default_str();
  app->add_option("--concurrency", o.concurrency, "Maximum concurrent LLM requests")->capture_default_str();
  app->add_option("--mock-reference", o.mock_reference,
                  "Mock provider: reference script whose lines repair requests restore");
  app->add_option("--mock-scores", o.mock_scores, "Mock provider: seven comma-separated evaluation scores");
}

void add_executor_options(CLI::App* app, ExecutorOptions& o) {
  app->add_option("--executor", o.kind, "Executor: builtin or bridge (child process speaking arise-exec/1)")
      ->check(CLI::IsMember({"builtin", "bridge"}))
      ->capture_default_str();
  app->add_option("--executor-cmd", o.command, "Bridge executor command line (default: arise-exec-server)");
  app->add_option("--executor-timeout", o.timeout_s, "Bridge response timeout in seconds")->capture_default_str();
}

void add_sampling_options(CLI::App* app, double& temperature) {
  auto* explicit_temperature =
      app->add_option("--temperature", temperature, "Sampling temperature")->capture_default_str();
  app->add_option_function<std::string>(
         "--profile",
         [&temperature, explicit_temperature](const std::string& profile) {
           if (explicit_temperature->count() > 0) return;
           temperature = profile == "precise" ? llm::kPreciseTemperature : llm::kDefaultTemperature;
           explicit_temperature->default_str(CLI::detail::to_string(temperature));
         },
         "Sampling profile: default (temperature 1.0) or precise (0.3); --temperature wins")
      ->check(CLI::IsMember({"default", "precise"}));
}

std::unique_ptr<CLI::App> build_app(Options& o) {
  auto app = std::make_unique<CLI::App>("Scenario script generation with retrieval, validation and repair", "arise");
  app->set_config("--config", "", "Key/value config file; [command] sections hold that command's flags");
  app->allow_config_extras(CLI::config_extras_mode::error);
  app->add_flag("--dump-config", o.dump_config, "Print the effective configuration and exit");
  app->require_subcommand(1, 1);

  auto* gen = app->add_subcommand("generate", "Run the generation pipeline over scenario prompts");
  auto& g = o.generate;
  add_provider_options(gen, g.provider);
  add_executor_options(gen, g.executor);
  add_sampling_options(gen, g.temperature);
  gen->add_option("--top-k", g.top_k, "Retrieved exemplars per component")->capture_default_str();
  gen->add_option("--max-repairs", g.max_repairs, "Repair loop budget")->capture_default_str();
  gen->add_option("--spawn-attempts", g.spawn_attempts, "Spawn attempts per execution")->capture_default_str();
  gen->add_option("--runs", g.runs, "Runs per scenario")->capture_default_str();
  gen->add_option("--seed", g.seed, "Base executor seed")->capture_default_str();
  gen->add_option("--workers", g.workers, "Concurrent runs")->capture_default_str();
  gen->add_option("--kb", g.kb, "Knowledge base file")->capture_default_str();
  gen->add_option("--kb-cache", g.kb_cache, "Embedding cache file");
  gen->add_option("--maps", g.maps, "Road network directory")->capture_default_str();
  gen->add_option("--prompts", g.prompts, "Scenario prompt file")->capture_default_str();
  gen->add_option("--defaults", g.defaults, "Default component script")->capture_default_str();
  gen->add_option("--repair-examples", g.repair_examples, "Repair exemplar file")->capture_default_str();
  gen->add_option("--out", g.out, "Output directory")->capture_default_str();
  gen->add_option("--scenarios", g.scenarios, "Only these scenario ids")->delimiter(',');
  gen->add_option("--categories", g.categories, "Only these categories")->delimiter(',');
  gen->add_option("--per-category", g.per_category, "Only the first N prompts of each category (0: all)")
      ->capture_default_str();
  gen->add_flag("--save-scripts,!--no-save-scripts", g.save_scripts, "Persist every repair attempt")
      ->capture_default_str();
  gen->fallthrough();

  auto* met = app->add_subcommand("metrics", "Render ESR, RCR and SCS tables from a run log");
  met->add_option("--log", o.metrics.log, "Run log")->required();
  met->add_option("--scs", o.metrics.scs, "Evaluation records from `eval`");
  met->add_flag("--json", o.metrics.json, "Machine-readable output");
  met->fallthrough();

  auto* ev = app->add_subcommand("eval", "Score scripts against descriptions with the primed evaluator");
  auto& e = o.eval;
  add_provider_options(ev, e.provider);
  ev->add_option("--pairs", e.pairs, "JSON lines of {description, script[, id, category]} file paths")->required();
  ev->add_option("--repeat", e.repeat, "Evaluations per pair")->capture_default_str();
  add_sampling_options(ev, e.temperature);
  ev->add_option("--material", e.material, "Rubric, reference and exemplar directory")->capture_default_str();
  ev->add_option("--out", e.out, "Score records file (default: standard output)");
  ev->fallthrough();

  auto* rep = app->add_subcommand("repair", "Run the repair loop on one script");
  auto& r = o.repair;
  add_provider_options(rep, r.provider);
  add_executor_options(rep, r.executor);
  rep->add_option("--script", r.script, "Script to repair")->required();
  auto* d = rep->add_option("--description", r.description, "Scenario description");
  auto* df = rep->add_option("--description-file", r.description_file, "File holding the scenario description");
  d->excludes(df);
  rep->add_option("--out", r.out, "Attempt directory")->capture_default_str();
  rep->add_option("--max-repairs", r.max_repairs, "Repair loop budget")->capture_default_str();
  rep->add_option("--spawn-attempts", r.spawn_attempts, "Spawn attempts per execution")->capture_default_str();
  rep->add_option("--seed", r.seed, "Executor seed")->capture_default_str();
  add_sampling_options(rep, r.temperature);
  rep->add_option("--maps", r.maps, "Road network directory")->capture_default_str();
  rep->add_option("--repair-examples", r.repair_examples, "Repair exemplar file")->capture_default_str();
  rep->fallthrough();

  auto* kbv = app->add_subcommand("kb-validate", "Check that every knowledge-base snippet parses in its region");
  kbv->add_option("--kb", o.kb.kb, "Knowledge base file")->capture_default_str();
  kbv->fallthrough();
  return app;
}

std::string default_model(const std::string& kind) {
  if (kind == "openai_compatible") return "gpt-4o";
  if (kind == "deepseek") return "deepseek-chat";
  if (kind == "gemini") return "gemini-1.5-pro";
  if (kind == "mock") return "mock";
  return "heuristic";
}

std::string default_key_env(const std::string& kind) {
  if (kind == "deepseek") return "DEEPSEEK_API_KEY";
  if (kind == "gemini") return "GEMINI_API_KEY";
  return "OPENAI_API_KEY";
}

std::optional<std::string> mock_scores_reply(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<std::string> parts;
  std::istringstream in(spec);
  for (std::string part; std::getline(in, part, ',');) parts.push_back(part);
  if (parts.size() != eval::kCriteria.size())
    throw Error("cli.bad_option", "--mock-scores needs " + std::to_string(eval::kCriteria.size()) + " values");
  eval::CriteriaScores s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    try {
      s.scores[i] = std::stoi(std::string(util::trim(parts[i])));
    } catch (const std::exception&) {
      throw Error("cli.bad_option", "--mock-scores value '" + parts[i] + "' is not an integer");
    }
    s.rationale[i] = "fixed score";
  }
  return eval::render_scores(s);
}

std::unique_ptr<llm::Gateway> make_gateway(const ProviderOptions& o, const exec::MapSet* maps) {
  auto kind = llm::provider_kind_from(o.kind);
  if (!kind) throw Error("cli.bad_option", "unknown provider '" + o.kind + "'");
  std::shared_ptr<llm::Provider> provider;
  switch (*kind) {
    case llm::ProviderKind::heuristic: {
      std::vector<std::string> names;
      if (maps)
        for (const auto& m : maps->catalog()) names.push_back(m);
      provider = names.empty() ? std::make_shared<offline::HeuristicProvider>()
                               : std::make_shared<offline::HeuristicProvider>(names);
      break;
    }
    case llm::ProviderKind::replay:
      if (!fs::is_directory(o.fixtures)) throw Error("cli.bad_option", "fixture directory '" + o.fixtures + "' not found");
      provider = std::make_shared<llm::ReplayProvider>(o.fixtures);
      break;
    case llm::ProviderKind::mock: {
      std::map<llm::Tag, std::string> canned;
      if (auto reply = mock_scores_reply(o.mock_scores)) canned[llm::Tag::evaluate] = *reply;
      llm::MockProvider::Responder responder;
      if (!o.mock_reference.empty()) responder = offline::line_restore_oracle(util::read_file(o.mock_reference));
      if (canned.empty() && !responder)
        throw Error("cli.bad_option", "the mock provider needs --mock-reference or --mock-scores");
      provider = std::make_shared<llm::MockProvider>(std::move(canned), std::move(responder));
      break;
    }
    case llm::ProviderKind::openai_compatible:
    case llm::ProviderKind::gemini:
    case llm::ProviderKind::deepseek: {
      llm::ProviderConfig c;
      c.kind = *kind;
      c.endpoint = o.endpoint;
      c.credential_env = o.api_key_env.empty() ? default_key_env(o.kind) : o.api_key_env;
      c.default_model = o.model.empty() ? default_model(o.kind) : o.model;
      c.timeout_s = o.timeout_s;
      c.retry.max_retries = o.max_retries;
      provider = llm::make_http_provider(c);
      break;
    }
  }
  if (!o.record.empty()) {
    fs::create_directories(o.record);
    provider = std::make_shared<llm::RecordingProvider>(provider, o.record);
  }
  return std::make_unique<llm::Gateway>(provider, o.model.empty() ? default_model(o.kind) : o.model,
                                        std::max(1, o.concurrency));
}

std::string self_dir() {
  std::error_code ec;
  auto exe = fs::read_symlink("/proc/self/exe", ec);
  return ec ? std::string() : exe.parent_path().string();
}

pipeline::ValidatorFactory make_validators(const ExecutorOptions& o, const std::string& maps_dir,
                                           std::shared_ptr<const exec::MapSet> maps) {
  if (o.kind == "builtin")
    return [maps] { return std::make_unique<exec::BuiltinValidator>(maps); };
  protocol::SessionConfig config;
  config.timeout_s = o.timeout_s;
  if (o.command.empty()) {
    auto sibling = self_dir() + "/arise-exec-server";
    config.command = {fs::exists(sibling) ? sibling : "arise-exec-server", "--maps", maps_dir};
  } else {
    std::istringstream words(o.command);
    for (std::string w; words >> w;) config.command.push_back(w);
  }
  return [config] { return std::make_unique<protocol::BridgeValidator>(config); };
}

json provider_json(const ProviderOptions& o) {
  json j = {{"kind", o.kind}, {"model", o.model.empty() ? default_model(o.kind) : o.model}};
  if (!o.endpoint.empty()) j["endpoint"] = o.endpoint;
  return j;
}

std::vector<pipeline::ScenarioPrompt> select_prompts(const GenerateOptions& g) {
  auto all = pipeline::load_prompts(g.prompts);
  for (const auto& id : g.scenarios)
    if (std::none_of(all.begin(), all.end(), [&](const auto& p) { return p.id == id; }))
      throw Error("cli.unknown_scenario", "unknown scenario id '" + id + "'");
  for (const auto& c : g.categories)
    if (!pipeline::is_scenario_category(c)) throw Error("cli.unknown_category", "unknown category '" + c + "'");
  std::vector<pipeline::ScenarioPrompt> out;
  std::map<std::string, int> taken;
  for (const auto& p : all) {
    if (!g.scenarios.empty() && std::find(g.scenarios.begin(), g.scenarios.end(), p.id) == g.scenarios.end()) continue;
    if (!g.categories.empty() && std::find(g.categories.begin(), g.categories.end(), p.category) == g.categories.end())
      continue;
    if (g.per_category > 0 && taken[p.category] >= g.per_category) continue;
    ++taken[p.category];
    out.push_back(p);
  }
  if (out.empty()) throw Error("cli.no_scenarios", "the filters select no scenario");
  return out;
}

void check_positive(int value, const char* flag) {
  if (value < 1) throw Error("cli.bad_option", std::string(flag) + " must be at least 1");
}

int cmd_generate(const GenerateOptions& g, std::ostream& out, std::ostream& err) {
  check_positive(g.runs, "--runs");
  check_positive(g.workers, "--workers");
  check_positive(g.max_repairs, "--max-repairs");
  check_positive(g.spawn_attempts, "--spawn-attempts");
  check_positive(static_cast<int>(g.top_k), "--top-k");
  auto prompts = select_prompts(g);
  auto maps = std::make_shared<const exec::MapSet>(exec::MapSet::load_dir(g.maps));
  if (maps->empty()) throw Error("cli.bad_option", "no maps in '" + g.maps + "'");
  pipeline::Resources res;
  std::optional<std::string> cache;
  if (!g.kb_cache.empty()) cache = g.kb_cache;
  res.kb = std::make_shared<const kb::KnowledgeBase>(
      kb::KnowledgeBase::load(g.kb, std::make_shared<kb::TrigramEmbedder>(), cache));
  res.maps = maps;
  res.defaults = pipeline::Defaults::load(g.defaults);
  res.repair_exemplars = repair::load_exemplars(g.repair_examples);
  auto gateway = make_gateway(g.provider, maps.get());
  auto validators = make_validators(g.executor, g.maps, maps);

  fs::create_directories(g.out);
  std::mutex calls_mu;
  std::ofstream calls(g.out + "/llm_calls.jsonl");
  gateway->set_observer([&](const llm::CallRecord& c) {
    json j = {{"tag", llm::to_string(c.tag)}, {"request_hash", c.request_hash}, {"provider", c.provider},
              {"attempts", c.attempts}, {"latency_ms", c.latency_ms}};
    if (!c.error_code.empty()) j["error"] = c.error_code;
    std::lock_guard lock(calls_mu);
    calls << j.dump() << '\n';
  });

  pipeline::RunnerConfig rc;
  rc.temperature = g.temperature;
  rc.top_k = g.top_k;
  rc.max_repairs = g.max_repairs;
  rc.spawn_attempts = g.spawn_attempts;
  rc.runs = g.runs;
  rc.seed = g.seed;
  rc.workers = g.workers;
  if (g.save_scripts) rc.out_dir = g.out + "/scripts";

  json ids = json::array();
  for (const auto& p : prompts) ids.push_back(p.id);
  json config = {{"provider", provider_json(g.provider)},
                 {"executor", g.executor.kind},
                 {"temperature", g.temperature},
                 {"top_k", g.top_k},
                 {"max_repairs", g.max_repairs},
                 {"spawn_attempts", g.spawn_attempts},
                 {"runs", g.runs},
                 {"seed", g.seed},
                 {"kb_fingerprint", res.kb->fingerprint()},
                 {"scenarios", ids}};
  metrics::RunLogWriter log(g.out + "/runs.jsonl", config);
  auto result = pipeline::run_batch(prompts, *gateway, validators, res, rc, &log);
  out << metrics::render(metrics::report(result.records));
  out << log.written() << " run records written to " << g.out << "/runs.jsonl\n";
  if (result.infrastructure_errors > 0) {
    err << "arise: " << result.infrastructure_errors << " runs hit provider or executor failures\n";
    for (const auto& r : result.records)
      if (!r.error_code.empty() && exit_code_for(r.error_code) == kExitInfrastructure) {
        err << "arise: first failure: " << r.scenario_id << " run " << r.run_index << ": "
            << (r.diagnostics_summary.empty() ? r.error_code : r.diagnostics_summary.back()) << '\n';
        break;
      }
    return kExitInfrastructure;
  }
  return kExitOk;
}

std::map<std::string, std::vector<double>> read_scs(const std::string& path) {
  std::map<std::string, std::vector<double>> out;
  int line_no = 0;
  for (const auto& line : util::split_lines(util::read_file(path))) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      if (j.contains("summary")) continue;
      out[j.at("category").get<std::string>()].push_back(j.at("scs_percent").get<double>());
    } catch (const json::exception& e) {
      throw Error("metrics.bad_log", path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

int cmd_metrics(const MetricsOptions& m, std::ostream& out) {
  auto log = metrics::read_run_log(m.log);
  std::map<std::string, std::vector<double>> scs;
  if (!m.scs.empty()) scs = read_scs(m.scs);
  auto r = metrics::report(log.records, scs);
  out << (m.json ? metrics::render_json(r) + "\n" : metrics::render(r));
  return kExitOk;
}

int cmd_eval(const EvalOptions& e, std::ostream& out, std::ostream& err) {
  check_positive(e.repeat, "--repeat");
  auto material = eval::ReferenceMaterial::load(e.material);
  auto session = eval::prime(material, e.temperature);
  auto gateway = make_gateway(e.provider, nullptr);
  auto base = fs::path(e.pairs).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };

  std::ofstream file;
  if (!e.out.empty()) file.open(e.out);
  std::ostream& records = e.out.empty() ? out : static_cast<std::ostream&>(file);
  std::vector<double> all;
  int line_no = 0;
  for (const auto& line : util::split_lines(util::read_file(e.pairs))) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    json pair;
    try {
      pair = json::parse(line);
      pair.at("description").get<std::string>();
      pair.at("script").get<std::string>();
    } catch (const json::exception& ex) {
      throw Error("cli.bad_pairs", e.pairs + " line " + std::to_string(line_no) + ": " + ex.what());
    }
    auto description = std::string(util::trim(util::read_file(resolve(pair["description"]))));
    auto script = util::read_file(resolve(pair["script"]));
    std::string id = pair.value("id", "pair-" + std::to_string(line_no));
    std::string category = pair.value("category", std::string("uncategorised"));
    std::vector<double> percents;
    for (int i = 0; i < e.repeat; ++i) {
      auto s = eval::score(session, description, script, *gateway);
      json scores = json::object();
      for (std::size_t c = 0; c < eval::kCriteria.size(); ++c) scores[std::string(eval::kCriteria[c])] = s.scores[c];
      double pct = 100.0 * s.scs();
      percents.push_back(pct);
      records << json{{"id", id}, {"category", category}, {"repeat", i},   {"scores", scores},
                      {"total", s.total()}, {"scs_percent", pct}}
                     .dump()
              << '\n';
    }
    all.insert(all.end(), percents.begin(), percents.end());
    if (percents.size() >= 2) {
      auto st = eval::consistency_stats(percents);
      err << id << ": min " << util::fixed(st.min, 2) << "  max " << util::fixed(st.max, 2) << "  mean "
          << util::fixed(st.mean, 2) << "  std " << util::fixed(st.std_pp, 2) << " pp\n";
    }
  }
  if (all.size() >= 2) {
    auto st = eval::consistency_stats(all);
    records << json{{"summary", {{"n", st.n}, {"min", st.min}, {"max", st.max}, {"mean", st.mean}, {"std_pp", st.std_pp}}}}
                   .dump()
            << '\n';
  }
  return kExitOk;
}

int cmd_repair(const RepairOptions& r, std::ostream& out, std::ostream& err) {
  check_positive(r.max_repairs, "--max-repairs");
  check_positive(r.spawn_attempts, "--spawn-attempts");
  auto script = util::read_file(r.script);
  std::string description = r.description_file.empty() ? r.description : std::string(util::trim(util::read_file(r.description_file)));
  auto maps = std::make_shared<const exec::MapSet>(exec::MapSet::load_dir(r.maps));
  auto gateway = make_gateway(r.provider, maps.get());
  auto validator = make_validators(r.executor, r.maps, maps)();
  repair::TrlConfig config;
  config.max_iterations = r.max_repairs;
  config.temperature = r.temperature;
  config.exemplars = repair::load_exemplars(r.repair_examples);
  exec::ExecutionLimits limits;
  limits.max_spawn_attempts = r.spawn_attempts;
  limits.seed = r.seed;
  repair::AttemptStore store(r.out);
  auto outcome = repair::run_trl(script, description, *validator, limits, *gateway, config, &store);
  for (const auto& a : outcome.attempts)
    out << "attempt " << a.iteration << ": " << exec::to_string(a.outcome) << " (fixing "
        << (a.diagnostics_in.empty() ? std::string("-") : a.diagnostics_in.front().code) << ")\n";
  if (outcome.success) {
    out << (outcome.first_attempt_success ? std::string("script passed without repair")
                                          : "success after " + std::to_string(outcome.attempts.size()) +
                                                " repair attempts")
        << "; final script: " << store.dir() << "/final.sdsl\n";
    return kExitOk;
  }
  if (outcome.error_code == "trl.llm_error") {
    err << "arise: " << outcome.error_message << '\n';
    return kExitInfrastructure;
  }
  out << "no passing script after " << outcome.attempts.size() << " repair attempts; final script: " << store.dir()
      << "/final.sdsl\n";
  for (const auto& d : outcome.final_diagnostics) out << dsl::render(d, outcome.final_script) << '\n';
  return kExitScenarioFailure;
}

int cmd_kb_validate(const KbOptions& k, std::ostream& out) {
  auto kb = kb::KnowledgeBase::load(k.kb, std::make_shared<kb::TrigramEmbedder>());
  auto diags = kb::validate_kb(kb);
  for (const auto& d : diags) out << dsl::render(d) << '\n';
  out << kb.entries().size() << " entries, " << diags.size() << " diagnostics\n";
  return diags.empty() ? kExitOk : kExitScenarioFailure;
}

}  // namespace

int exit_code_for(std::string_view code) {
  if (code.rfind("llm.", 0) == 0 || code.rfind("exec.bridge", 0) == 0 || code == "exec.protocol_error" ||
      code == "trl.llm_error")
    return kExitInfrastructure;
  return kExitConfig;
}

std::vector<std::string> commands() { return {"generate", "metrics", "eval", "repair", "kb-validate"}; }

std::vector<std::string> flags(std::string_view command) {
  Options o;
  auto app = build_app(o);
  std::vector<std::string> out;
  auto* sub = app->get_subcommand(std::string(command));
  for (const auto* opt : sub->get_options())
    for (const auto& name : opt->get_lnames()) out.push_back("--" + name);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  auto app = build_app(o);
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app->exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (o.dump_config) {
    out << app->config_to_str(true, false);
    return kExitOk;
  }
  try {
    if (app->got_subcommand("generate")) return cmd_generate(o.generate, out, err);
    if (app->got_subcommand("metrics")) return cmd_metrics(o.metrics, out);
    if (app->got_subcommand("eval")) return cmd_eval(o.eval, out, err);
    if (app->got_subcommand("repair")) return cmd_repair(o.repair, out, err);
    if (app->got_subcommand("kb-validate")) return cmd_kb_validate(o.kb, out);
  } catch (const Error& e) {
    err << "arise: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "arise: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace arise::cli
