#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "logkg/backend.hpp"
#include "logkg/errors.hpp"
#include "logkg/gateway.hpp"
#include "logkg/graph_json.hpp"

namespace logkg {
namespace {

struct GatewayHarness {
  std::shared_ptr<ScriptedBackend> backend = std::make_shared<ScriptedBackend>();
  BackendRegistry registry;
  std::vector<std::chrono::milliseconds> sleeps;
  LlmGateway gateway{registry, default_schema(), [this](std::chrono::milliseconds d) { sleeps.push_back(d); }};

  GatewayHarness() { registry.add("scripted", backend); }
};

const Conversation kPrompt{{Role::kSystem, "s"}, {Role::kUser, "Log event: x"}};

TEST(ExtractFirstJsonObject, Examples) {
  EXPECT_EQ(extract_first_json_object(R"(Here: {"a":{"b":1}} and {"c":2})"), R"({"a":{"b":1}})");
  EXPECT_EQ(extract_first_json_object(R"(x {"s":"}{\"}"} y)"), R"({"s":"}{\"}"})");
  EXPECT_FALSE(extract_first_json_object("no braces").has_value());
  EXPECT_FALSE(extract_first_json_object(R"({"open": )").has_value());
}

TEST(ParseBackendOutput, GuidedRequiresWholeDocument) {
  const auto g = serialize_graph(testing::event_graph("x"));
  EXPECT_TRUE(parse_backend_output(g, GenerationMode::kGuided).parsed.has_value());
  const auto wrapped = parse_backend_output("Sure! " + g, GenerationMode::kGuided);
  EXPECT_FALSE(wrapped.parsed.has_value());
  EXPECT_FALSE(wrapped.parse_errors.empty());
  EXPECT_EQ(wrapped.raw_text, "Sure! " + g);
}

TEST(ParseBackendOutput, BaselineExtractsFromProse) {
  const auto g = serialize_graph(testing::event_graph("x"));
  const auto r = parse_backend_output("Here is the graph:\n```json\n" + g + "\n```", GenerationMode::kBaseline);
  ASSERT_TRUE(r.parsed.has_value());
  EXPECT_EQ(*r.parsed, testing::event_graph("x"));
  const auto none = parse_backend_output("I cannot help.", GenerationMode::kBaseline);
  EXPECT_FALSE(none.parsed.has_value());
  EXPECT_EQ(none.parse_errors, std::vector<std::string>{"no JSON object found in the response"});
}

TEST(ParseBackendOutput, SanitizesRawText) {
  EXPECT_EQ(parse_backend_output("\xff", GenerationMode::kGuided).raw_text, "\xef\xbf\xbd");
}

TEST(Gateway, GuidedModeSendsOutputSchema) {
  GatewayHarness h;
  h.backend->push(ScriptedResponse::ok(serialize_graph(testing::event_graph("x"))));
  GenerationConfig cfg;
  cfg.temperature = 0.3;
  const auto r = h.gateway.generate(kPrompt, cfg);
  ASSERT_TRUE(r.parsed.has_value());
  const auto calls = h.backend->calls();
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_TRUE(calls[0].structured);
  EXPECT_DOUBLE_EQ(calls[0].temperature, 0.3);
  EXPECT_EQ(calls[0].messages, kPrompt);
}

TEST(Gateway, BaselineModeIsPlainText) {
  GatewayHarness h;
  h.backend->push(ScriptedResponse::ok("{}"));
  GenerationConfig cfg;
  cfg.mode = GenerationMode::kBaseline;
  h.gateway.generate(kPrompt, cfg);
  EXPECT_FALSE(h.backend->calls()[0].structured);
}

TEST(Gateway, RetriesTransportErrorsWithBackoff) {
  GatewayHarness h;
  h.backend->push(ScriptedResponse::fail(ScriptedFailure::kTimeout));
  h.backend->push(ScriptedResponse::fail(ScriptedFailure::kRateLimited));
  h.backend->push(ScriptedResponse::ok("{}"));
  GenerationConfig cfg;
  cfg.transport_retries = 2;
  cfg.retry_base_delay = std::chrono::milliseconds(100);
  EXPECT_NO_THROW(h.gateway.generate(kPrompt, cfg));
  EXPECT_EQ(h.backend->call_count(), 3u);
  EXPECT_EQ(h.sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100),
                                                                std::chrono::milliseconds(200)}));
}

TEST(Gateway, RethrowsWhenRetriesRunOut) {
  GatewayHarness h;
  for (int i = 0; i < 3; ++i) h.backend->push(ScriptedResponse::fail(ScriptedFailure::kUnavailable));
  GenerationConfig cfg;
  cfg.transport_retries = 2;
  EXPECT_THROW(h.gateway.generate(kPrompt, cfg), BackendUnavailable);
  EXPECT_EQ(h.backend->call_count(), 3u);
}

TEST(Gateway, UnknownBackendIsConfigError) {
  GatewayHarness h;
  GenerationConfig cfg;
  cfg.backend_id = "missing";
  EXPECT_THROW(h.gateway.generate(kPrompt, cfg), ConfigError);
}

TEST(GenerationConfig, Check) {
  GenerationConfig cfg;
  EXPECT_NO_THROW(cfg.check());
  cfg.temperature = -1.0;
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg = {};
  cfg.max_correction_rounds = -1;
  EXPECT_THROW(cfg.check(), ConfigError);
  EXPECT_EQ(generation_mode_from_string("baseline"), GenerationMode::kBaseline);
  EXPECT_EQ(to_string(GenerationMode::kGuided), "ontologx");
  EXPECT_THROW(generation_mode_from_string("fancy"), ConfigError);
}

TEST(ScriptedBackend, LoadScript) {
  testing::TempDir dir;
  testing::write_text(dir / "s.jsonl",
                      "{\"text\": \"hello\"}\n\n{\"graph\": {\"nodes\": [], \"relationships\": []}}\n"
                      "{\"error\": \"timeout\"}\n");
  const auto script = ScriptedBackend::load_script(dir / "s.jsonl");
  ASSERT_EQ(script.size(), 3u);
  EXPECT_EQ(script[0].text, "hello");
  EXPECT_EQ(parse_graph_or_throw(script[1].text), KnowledgeGraph{});
  EXPECT_EQ(script[2].failure, ScriptedFailure::kTimeout);

  testing::write_text(dir / "bad.jsonl", "{\"error\": \"meteor\"}\n");
  EXPECT_THROW(ScriptedBackend::load_script(dir / "bad.jsonl"), ConfigError);
  EXPECT_THROW(ScriptedBackend::load_script(dir / "none.jsonl"), ConfigError);
}

TEST(ScriptedBackend, EmptyQueueIsUnavailable) {
  ScriptedBackend b;
  BackendRequest req;
  EXPECT_THROW(b.complete(req), BackendUnavailable);
  EXPECT_EQ(b.call_count(), 1u);
}

}  // namespace
}  // namespace logkg
