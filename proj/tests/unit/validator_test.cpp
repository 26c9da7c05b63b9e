#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"
#include "logkg/validator.hpp"
#include "oracles.hpp"

namespace logkg {
namespace {

const OntologySchema& schema() { return default_schema(); }

TEST(Validate, ConformingEventWithUser) {
  const auto r = validate(testing::event_with_user("login ok", "root"), schema());
  EXPECT_TRUE(r.conforms());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Validate, MissingLogLevelIsCardinalityMin) {
  const auto r = validate(testing::graph_missing_level("boot"), schema());
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].code, ViolationCode::kCardinalityMin);
  EXPECT_EQ(r.violations[0].subject, "e");
}

TEST(Validate, WrongRangeIsRangeMismatch) {
  KnowledgeGraph g = testing::event_graph("x");
  g.nodes.push_back({"f", "File", {{"fileName", "/etc/passwd"}}});
  g.relationships.push_back({"e", "f", "hasUser"});
  const auto r = validate(g, schema());
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].code, ViolationCode::kRangeMismatch);
  EXPECT_EQ(r.violations[0].subject, "(e, hasUser, f)");
}

TEST(Validate, EnumAndUnknownVocabulary) {
  KnowledgeGraph g = testing::event_graph("x", "LOUD");
  g.nodes.push_back({"h", "Host", {}});
  g.nodes[0].properties.push_back({"color", "red"});
  g.relationships.push_back({"e", "h", "runsOn"});
  const auto counts = testing::count_codes(validate(g, schema()));
  EXPECT_EQ(counts.at(ViolationCode::kValueNotInEnum), 1u);
  EXPECT_EQ(counts.at(ViolationCode::kUnknownClass), 1u);
  EXPECT_EQ(counts.at(ViolationCode::kUnknownProperty), 1u);
  EXPECT_EQ(counts.at(ViolationCode::kUnknownRelationship), 1u);
}

TEST(Validate, AnchorCountAndConnectivity) {
  EXPECT_EQ(validate({}, schema()).violations.at(0).code, ViolationCode::kNotExactlyOneAnchor);
  KnowledgeGraph two = testing::event_graph("a");
  two.nodes.push_back({"e2", "Event", {{"eventMessage", "b"}, {"logLevel", "INFO"}}});
  const auto counts = testing::count_codes(validate(two, schema()));
  EXPECT_EQ(counts.at(ViolationCode::kNotExactlyOneAnchor), 1u);
  EXPECT_EQ(counts.at(ViolationCode::kDisconnectedNode), 1u);
}

TEST(Validate, StructuralDefectsAreViolations) {
  KnowledgeGraph g = testing::event_graph("a");
  g.relationships.push_back({"e", "ghost", "hasUser"});
  EXPECT_EQ(testing::count_codes(validate(g, schema())).at(ViolationCode::kDanglingEndpoint), 1u);
  g = testing::event_with_user("a", "u");
  g.nodes.push_back(g.nodes[1]);
  EXPECT_EQ(testing::count_codes(validate(g, schema())).at(ViolationCode::kDuplicateNodeId), 1u);
}

TEST(Validate, EventMessageMismatchIsWarningOnly) {
  ValidationOptions opts;
  opts.expected_event_message = "the raw line";
  const auto r = validate(testing::event_graph("paraphrased line"), schema(), opts);
  EXPECT_TRUE(r.conforms());
  EXPECT_EQ(r.warnings.size(), 1u);
  opts.expected_event_message = "paraphrased line";
  EXPECT_TRUE(validate(testing::event_graph("paraphrased line"), schema(), opts).warnings.empty());
}

TEST(Validate, Deterministic) {
  testing::Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto g = testing::random_graph(rng);
    ASSERT_EQ(validate(g, schema()), validate(g, schema()));
  }
}

TEST(ViolationCodes, NamesRoundTrip) {
  for (const auto code : kAllViolationCodes) {
    EXPECT_EQ(violation_code_from_string(to_string(code)), code);
  }
  EXPECT_EQ(to_string(ViolationCode::kNotExactlyOneAnchor), "NOT_EXACTLY_ONE_ANCHOR");
  EXPECT_FALSE(violation_code_from_string("NOPE").has_value());
}

TEST(ReportJson, RoundTrip) {
  KnowledgeGraph g = testing::event_graph("x", "LOUD");
  g.relationships.push_back({"e", "z", "hasUser"});
  ValidationOptions opts;
  opts.expected_event_message = "y";
  const auto r = validate(g, schema(), opts);
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(ViolationRate, Examples) {
  const ValidationReport ok;
  ValidationReport bad;
  bad.violations.push_back({ViolationCode::kUnknownClass, "n", "m"});
  const std::vector<ValidationReport> reports{ok, bad, ok, ok};
  EXPECT_DOUBLE_EQ(violation_rate(reports), 0.25);
  EXPECT_THROW(violation_rate(std::span<const ValidationReport>{}), EmptyInput);
}

// Property: per-code violation counts agree with a nested-loop restatement of
// every constraint, on arbitrary graphs including structural defects.
TEST(ValidateProperty, AgreesWithBruteForceOracle) {
  testing::Rng rng(2024);
  for (int i = 0; i < 3000; ++i) {
    const auto g = testing::random_graph(rng);
    ASSERT_EQ(testing::count_codes(validate(g, schema())), testing::brute_force_violations(g, schema()))
        << serialize_graph(g);
  }
}

// Property: generated conforming graphs conform, and each injected defect is
// reported with its own code.
TEST(ValidateProperty, InjectedDefectsAreDetected) {
  testing::Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    auto g = testing::random_conforming_graph(rng, schema());
    ASSERT_TRUE(validate(g, schema()).conforms()) << serialize_graph(g);
    for (const auto code : kAllViolationCodes) {
      auto broken = g;
      testing::inject_defect(rng, broken, schema(), code);
      const auto counts = testing::count_codes(validate(broken, schema()));
      ASSERT_TRUE(counts.contains(code)) << to_string(code) << " " << serialize_graph(broken);
    }
  }
}

}  // namespace
}  // namespace logkg
