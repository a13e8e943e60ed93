#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "arise/exec/serialize.hpp"
#include "arise/exec/validate.hpp"
#include "arise/protocol/protocol.hpp"
#include "arise/protocol/session.hpp"
#include "support.hpp"

using namespace arise;
using namespace arise::protocol;
using testing_support::error_code;

namespace {

std::shared_ptr<const exec::MapSet> maps() {
  static auto m = std::make_shared<const exec::MapSet>(exec::MapSet::load_dir(testing_support::data_path("maps")));
  return m;
}

SessionConfig fake(const std::string& mode, double timeout_s = 5.0) {
  return {{ARISE_FAKE_EXECUTOR, mode}, timeout_s};
}

SessionConfig server() { return {{ARISE_EXEC_SERVER, "--maps", testing_support::data_path("maps")}, 30.0}; }

std::string serve_all(const std::string& input) {
  std::istringstream in(input);
  std::ostringstream out;
  Server(maps()).serve(in, out);
  return out.str();
}

}  // namespace

TEST(Protocol, RequestRoundTrip) {
  ExecRequest r;
  r.kind = RequestKind::execute;
  r.id = "7";
  r.script = "model scenic\nego = Car\n";
  r.limits.seed = 42;
  r.limits.max_spawn_attempts = 3;
  auto back = decode_request(encode(r));
  EXPECT_EQ(back.kind, r.kind);
  EXPECT_EQ(back.id, r.id);
  EXPECT_EQ(back.script, r.script);
  EXPECT_EQ(back.limits, r.limits);
  EXPECT_EQ(encode(r).find('\n'), std::string::npos);
}

TEST(Protocol, MalformedRequestsAreProtocolErrors) {
  EXPECT_EQ(error_code([] { decode_request("{"); }), "exec.protocol_error");
  EXPECT_EQ(error_code([] { decode_request(R"({"kind":"dance","id":"1"})"); }), "exec.protocol_error");
  EXPECT_EQ(error_code([] { decode_request(R"({"kind":"compile","id":"1"})"); }), "exec.protocol_error");
  EXPECT_EQ(error_code([] { decode_response(R"({"id":"1","status":"fine"})"); }), "exec.protocol_error");
}

TEST(Protocol, GoldenTranscript) {
  std::string input = testing_support::read(testing_support::test_data("protocol/requests.jsonl"));
  std::string expected = testing_support::read(testing_support::test_data("protocol/responses.jsonl"));
  EXPECT_EQ(serve_all(input), expected);
}

TEST(Protocol, HelloMustComeFirst) {
  auto out = serve_all(R"({"kind":"compile","id":"1","script":"model scenic"})" "\n");
  auto r = decode_response(out.substr(0, out.find('\n')));
  EXPECT_EQ(r.status, ResponseStatus::protocol_error);
  EXPECT_EQ(r.id, "1");
}

TEST(Protocol, ServerRejectsOtherVersions) {
  auto out = serve_all(R"({"kind":"hello","id":"1","version":"arise-exec/0"})" "\n");
  EXPECT_EQ(decode_response(out.substr(0, out.find('\n'))).status, ResponseStatus::protocol_error);
}

TEST(Protocol, ServerStopsAfterShutdown) {
  auto out = serve_all(R"({"kind":"hello","id":"1","version":"arise-exec/1"})" "\n"
                       R"({"kind":"shutdown","id":"2"})" "\n"
                       R"({"kind":"compile","id":"3","script":"model scenic"})" "\n");
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 2);
}

TEST(Protocol, VersionMismatchIsReported) {
  EXPECT_EQ(error_code([] { Session s(fake("version")); }), "exec.protocol_error");
}

TEST(Protocol, CrashIsReportedAndValidatorRecovers) {
  BridgeValidator v(fake("crash"));
  EXPECT_EQ(error_code([&] { v.validate("model scenic\n", {}); }), "exec.bridge_crash");
  // A fresh child is spawned for the next call.
  EXPECT_EQ(error_code([&] { v.validate("model scenic\n", {}); }), "exec.bridge_crash");
}

TEST(Protocol, HangIsTimedOut) {
  auto start = std::chrono::steady_clock::now();
  BridgeValidator v(fake("hang", 0.3));
  EXPECT_EQ(error_code([&] { v.validate("model scenic\n", {}); }), "exec.bridge_timeout");
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(Protocol, MismatchedIdAndGarbageAreProtocolErrors) {
  BridgeValidator a(fake("badid"));
  EXPECT_EQ(error_code([&] { a.validate("model scenic\n", {}); }), "exec.protocol_error");
  BridgeValidator b(fake("garbage"));
  EXPECT_EQ(error_code([&] { b.validate("model scenic\n", {}); }), "exec.protocol_error");
}

TEST(Protocol, MissingExecutableIsACrash) {
  EXPECT_EQ(error_code([] { Session s({{"/nonexistent/arise-executor"}, 5.0}); }), "exec.bridge_crash");
}

TEST(Protocol, BridgeMatchesBuiltinOnSeedsAndFixtures) {
  exec::BuiltinValidator builtin(maps());
  BridgeValidator bridge(server());
  auto paths = testing_support::seed_paths();
  for (auto& p : testing_support::files_in(testing_support::test_data("exec"), ".sdsl")) paths.push_back(p);
  paths.push_back(testing_support::test_data("protocol/broken.sdsl"));
  ASSERT_GE(paths.size(), 40u);
  for (const auto& path : paths) {
    auto source = testing_support::read(path);
    for (std::uint64_t seed : {0ull, 7ull}) {
      exec::ExecutionLimits limits;
      limits.seed = seed;
      auto want = builtin.validate(source, limits);
      auto got = bridge.validate(source, limits);
      EXPECT_EQ(nlohmann::json(got).dump(), nlohmann::json(want).dump()) << path << " seed " << seed;
      EXPECT_TRUE(got == want) << path;
    }
  }
}
