#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "logkg/errors.hpp"
#include "logkg/model.hpp"

namespace logkg {
namespace {

TEST(MakeLogEvent, RejectsBlankText) {
  EXPECT_THROW(make_log_event("  \t ", std::nullopt, std::nullopt, 0), EmptyInput);
  EXPECT_THROW(make_log_event("", std::nullopt, std::nullopt, 0), EmptyInput);
}

TEST(MakeLogEvent, ReplacesInvalidBytesAndKeepsProvenance) {
  const auto ev = make_log_event("login \xff ok", std::string("sshd"), std::string("auth.log"), 7);
  EXPECT_EQ(ev.raw_text, "login \xef\xbf\xbd ok");
  EXPECT_EQ(ev.context, "sshd");
  EXPECT_EQ(ev.source_file, "auth.log");
  EXPECT_EQ(ev.sequence_no, 7u);
}

TEST(LogEvent, EmbeddingTextAppendsContext) {
  EXPECT_EQ(make_log_event("x", std::nullopt, std::nullopt, 0).embedding_text(), "x");
  EXPECT_EQ(make_log_event("x", std::string("ctx"), std::nullopt, 0).embedding_text(), "x\nctx");
}

TEST(GraphIsEmpty, Examples) {
  EXPECT_TRUE(graph_is_empty({}));
  KnowledgeGraph one;
  one.nodes.push_back({"e", "Event", {}});
  EXPECT_FALSE(graph_is_empty(one));
  KnowledgeGraph nodes_only;
  nodes_only.nodes = {{"a", "File", {}}, {"b", "File", {}}};
  EXPECT_FALSE(graph_is_empty(nodes_only));
}

TEST(StructuralCheck, DanglingEndpoint) {
  KnowledgeGraph g;
  g.nodes.push_back({"n1", "Event", {}});
  g.relationships.push_back({"n1", "n9", "hasUser"});
  const auto errs = structural_check(g);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].kind, StructuralErrorKind::kDanglingEndpoint);
  EXPECT_EQ(to_string(errs[0]), "DanglingEndpoint(n9)");
}

TEST(StructuralCheck, DuplicateNodeId) {
  KnowledgeGraph g;
  g.nodes = {{"n1", "Event", {}}, {"n1", "File", {}}};
  const auto errs = structural_check(g);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(to_string(errs[0]), "DuplicateNodeId(n1)");
}

TEST(StructuralCheck, DuplicatePropertyKey) {
  KnowledgeGraph g;
  g.nodes.push_back({"n1", "Event", {{"logLevel", "INFO"}, {"logLevel", "ERROR"}, {"logLevel", "DEBUG"}}});
  const auto errs = structural_check(g);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].kind, StructuralErrorKind::kDuplicatePropertyKey);
  EXPECT_EQ(errs[0].property_key, "logLevel");
}

TEST(StructuralCheck, WellFormedTwoNodeGraph) {
  KnowledgeGraph g;
  g.nodes = {{"e", "Event", {}}, {"u", "UserIdentity", {}}};
  g.relationships.push_back({"e", "u", "hasUser"});
  EXPECT_TRUE(structural_check(g).empty());
}

// structural_check is empty exactly when ids are unique, keys are unique per node
// and every endpoint exists.
TEST(StructuralCheck, AgreesWithInvariantsOnRandomGraphs) {
  testing::Rng rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto g = testing::random_graph(rng);
    bool ok = true;
    std::set<std::string> ids;
    for (const auto& n : g.nodes) {
      ok = ok && ids.insert(n.id).second;
      std::set<std::string> keys;
      for (const auto& p : n.properties) ok = ok && keys.insert(p.key).second;
    }
    for (const auto& r : g.relationships) ok = ok && ids.contains(r.source_id) && ids.contains(r.target_id);
    ASSERT_EQ(structural_check(g).empty(), ok) << "iteration " << iter;
  }
}

}  // namespace
}  // namespace logkg
