// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails. Tolerances and sample sizes are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "generators.hpp"
#include "logkg/backend.hpp"
#include "logkg/errors.hpp"
#include "logkg/graph_json.hpp"
#include "logkg/metrics.hpp"
#include "logkg/mmr.hpp"
#include "logkg/ntriples.hpp"
#include "logkg/pipeline.hpp"
#include "logkg/prompts.hpp"
#include "logkg/sampler.hpp"
#include "logkg/validator.hpp"
#include "oracles.hpp"

namespace {

using namespace logkg;
namespace fs = std::filesystem;

constexpr int kValidatorGraphs = 1200;
constexpr double kValidatorBudgetSec = 30.0;
constexpr int kMmrSets = 600;
constexpr std::size_t kMmrMaxCandidates = 8;
constexpr double kMmrLambdas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
constexpr int kMetricPairs = 1200;
constexpr double kWorkedExampleTol = 1e-9;
constexpr int kRoundTripJsonGraphs = 1000;
constexpr int kRoundTripRdfGraphs = 100;
constexpr double kEndToEndBudgetSec = 10.0;
constexpr std::int64_t kFrozenClockMs = 1700000000000;

struct Result {
  bool ok = true;
  std::string detail;
};

// Collects the first failure message; later checks still run but are not reported.
struct Check {
  Result r;
  void expect(bool cond, const std::string& what) {
    if (!cond && r.ok) {
      r.ok = false;
      r.detail = what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Result criterion_validator() {
  Check c;
  const auto& schema = default_schema();
  testing::Rng rng(1001);
  std::map<ViolationCode, int> injected;
  const auto start = std::chrono::steady_clock::now();
  int checked = 0;
  for (int i = 0; i < kValidatorGraphs && c.r.ok; ++i) {
    const auto code = kAllViolationCodes[static_cast<std::size_t>(i) % std::size(kAllViolationCodes)];
    KnowledgeGraph g = testing::coin(rng, 0.8) ? testing::random_conforming_graph(rng, schema, 5)
                                               : testing::random_graph(rng, 5);
    testing::inject_defect(rng, g, schema, code);
    if (g.nodes.size() > 6) g.nodes.resize(6);  // keep the size bound even after injection
    const auto report = validate(g, schema);
    const auto want = testing::brute_force_violations(g, schema);
    const auto got = testing::count_codes(report);
    c.expect(got == want, "code multiset differs from brute force on " + serialize_graph(g));
    c.expect(report.conforms() == want.empty(), "conforms differs from brute force on " + serialize_graph(g));
    if (got.contains(code)) ++injected[code];
    ++checked;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(injected.size() == std::size(kAllViolationCodes), "not every violation code was exercised");
  c.expect(secs < kValidatorBudgetSec, "runtime " + fmt("%.2f", secs) + " s over budget");
  if (c.r.ok) c.r.detail = std::to_string(checked) + " graphs, 12/12 codes, " + fmt("%.2f", secs) + " s";
  return c.r;
}

Result criterion_mmr() {
  Check c;
  testing::Rng rng(2002);
  int compared = 0;
  int exhaustive = 0;
  for (int i = 0; i < kMmrSets && c.r.ok; ++i) {
    const std::size_t dim = testing::uniform(rng, 2, 8);
    const std::size_t n = testing::uniform(rng, 1, kMmrMaxCandidates);
    const std::size_t k = testing::uniform(rng, 1, n);
    const auto q = testing::random_unit_vector(rng, dim);
    std::vector<Embedding> cands;
    for (std::size_t j = 0; j < n; ++j) cands.push_back(testing::random_unit_vector(rng, dim));
    for (const double lambda : kMmrLambdas) {
      const MmrConfig cfg{lambda, k, n};
      const auto got = mmr_select_indices(q, cands, cfg);
      c.expect(got == testing::greedy_mmr_oracle(q, cands, lambda, k), "greedy oracle mismatch");
      const auto perm = testing::permutation_mmr_oracle(q, cands, lambda, k);
      if (!perm.empty()) {
        c.expect(got == perm, "exhaustive oracle mismatch");
        ++exhaustive;
      }
      if (lambda == 1.0) c.expect(got == testing::top_k_by_similarity(q, cands, k), "lambda=1 differs from top-k");
      ++compared;
    }
  }
  if (c.r.ok) {
    c.r.detail = std::to_string(kMmrSets) + " sets x 5 lambdas (" + std::to_string(compared) + " selections, " +
                 std::to_string(exhaustive) + " also exhaustive)";
  }
  return c.r;
}

Result criterion_correction_loop() {
  Check c;
  auto run = [](std::vector<std::string> responses, std::size_t& calls) {
    auto backend = std::make_shared<ScriptedBackend>();
    for (auto& r : responses) backend->push(ScriptedResponse::ok(std::move(r)));
    BackendRegistry registry;
    registry.add("scripted", backend);
    LlmGateway gateway(registry, default_schema(), [](std::chrono::milliseconds) {});
    HashingEmbedder embedder(64);
    PipelineConfig cfg;
    PipelineServices services{&gateway, &embedder, nullptr, nullptr, frozen_clock(0)};
    auto o = process_event(make_log_event("boot", std::nullopt, std::nullopt, 0), "e-0001", cfg, services);
    calls = backend->call_count();
    return o;
  };
  const auto valid = serialize_graph(testing::event_graph("boot"));
  const auto invalid = serialize_graph(testing::graph_missing_level("boot"));
  std::size_t calls = 0;

  auto a = run({valid}, calls);
  c.expect(a.status == OutcomeStatus::kValidFirstTry && calls == 1, "(a) expected VALID_FIRST_TRY with 1 call");
  auto b = run({invalid, valid}, calls);
  c.expect(b.status == OutcomeStatus::kValidAfterCorrection && calls == 2,
           "(b) expected VALID_AFTER_CORRECTION with 2 calls");
  auto f = run({invalid, invalid, invalid, invalid, invalid, invalid}, calls);
  c.expect(f.status == OutcomeStatus::kFailedEmpty && calls == 4 && graph_is_empty(f.graph),
           "(c) expected FAILED_EMPTY with 4 calls and an empty graph, got " + std::string(to_string(f.status)) +
               " with " + std::to_string(calls));
  if (c.r.ok) c.r.detail = "1 / 2 / 4 backend calls";
  return c.r;
}

Result criterion_metrics() {
  Check c;
  testing::Rng rng(4004);
  for (int i = 0; i < kMetricPairs && c.r.ok; ++i) {
    const auto a = testing::random_graph(rng);
    const auto b = testing::coin(rng, 0.25) ? a : testing::random_graph(rng);
    const auto got = precision_recall_f1(a, b);
    const auto want = testing::set_intersection_prf(a, b);
    c.expect(got.precision == want.precision && got.recall == want.recall && got.f1 == want.f1,
             "oracle mismatch on pair " + std::to_string(i));
  }
  auto node = [](std::string id, std::string type, std::string key, std::string value) {
    return GraphNode{std::move(id), std::move(type), {{std::move(key), std::move(value)}}};
  };
  KnowledgeGraph gen;
  gen.nodes = {node("a", "Source", "sourceName", "s1"), node("b", "File", "fileName", "f"),
               node("c", "URL", "urlValue", "u")};
  KnowledgeGraph gold;
  gold.nodes = {node("x", "Source", "sourceName", "s1"), node("y", "File", "fileName", "f"),
                node("z", "Application", "applicationName", "a"), node("w", "Process", "processName", "p")};
  const auto ex = precision_recall_f1(gen, gold);
  c.expect(std::abs(ex.precision - 2.0 / 3.0) < kWorkedExampleTol && std::abs(ex.recall - 0.5) < kWorkedExampleTol &&
               std::abs(ex.f1 - 4.0 / 7.0) < kWorkedExampleTol,
           "worked example gave P=" + fmt("%.12f", ex.precision) + " R=" + fmt("%.12f", ex.recall));
  const auto empty = precision_recall_f1({}, gold);
  c.expect(empty.precision == 0.0 && empty.recall == 0.0 && empty.f1 == 0.0, "empty graph did not score (0,0,0)");
  if (c.r.ok) {
    c.r.detail = std::to_string(kMetricPairs) + " pairs; worked example P=" + fmt("%.4f", ex.precision) +
                 " R=" + fmt("%.4f", ex.recall) + " F1=" + fmt("%.4f", ex.f1);
  }
  return c.r;
}

Result criterion_violation_rate() {
  Check c;
  testing::Rng rng(5005);
  const auto& schema = default_schema();
  std::vector<ValidationReport> reports;
  for (int i = 0; i < 100; ++i) {
    auto g = testing::random_conforming_graph(rng, schema);
    if (i % 10 < 3) {
      testing::inject_defect(rng, g, schema,
                             kAllViolationCodes[static_cast<std::size_t>(i) % std::size(kAllViolationCodes)]);
    }
    reports.push_back(validate(g, schema));
  }
  const double rate = violation_rate(reports);
  c.expect(rate == 0.30, "violation_rate returned " + fmt("%.17g", rate));
  if (c.r.ok) c.r.detail = "30 of 100 violating -> " + fmt("%.2f", rate);
  return c.r;
}

Result criterion_prompts() {
  Check c;
  const auto asset = testing::read_text(testing::source_dir() / "assets/prompts/generation_system.md");
  const auto format = testing::read_text(testing::source_dir() / "assets/prompts/baseline_output_format.md");
  const auto event = make_log_event("sshd[311]: Failed password for root from 10.0.0.5", std::nullopt, std::nullopt, 0);
  const auto guided = build_generation_prompt(event, {});
  c.expect(!guided.empty() && guided[0].role == Role::kSystem && guided[0].content == asset,
           "guided system prompt differs from the pinned asset");

  const auto baseline = build_baseline_prompt(event, default_schema());
  std::string expected = format;
  auto replace = [&](const std::string& from, const std::string& to) {
    const auto pos = expected.find(from);
    c.expect(pos != std::string::npos, "asset lacks placeholder " + from);
    if (pos != std::string::npos) expected.replace(pos, from.size(), to);
  };
  replace("{{properties schema}}", render_properties_schema(default_schema()));
  replace("{{triples}}", render_triples(default_schema()));
  // The JSON format is compared as JSON since key order is a rendering detail.
  const auto& sys = baseline.at(0).content;
  const std::string marker = "{{json output format}}";
  const auto split = expected.find(marker);
  c.expect(split != std::string::npos, "asset lacks placeholder " + marker);
  if (split != std::string::npos) {
    const auto head = expected.substr(0, split);
    const auto tail = expected.substr(split + marker.size());
    const auto at = sys.find(head);
    const auto end = at == std::string::npos ? at : sys.find(tail, at + head.size());
    c.expect(end != std::string::npos, "baseline prompt lacks the expanded output-format block");
    if (end != std::string::npos) {
      const auto embedded = sys.substr(at + head.size(), end - at - head.size());
      c.expect(nlohmann::json::parse(embedded) == graph_output_schema(nullptr),
               "embedded JSON format differs from the output schema");
    }
  }
  c.expect(sys.find("{{") == std::string::npos, "baseline prompt has an unexpanded placeholder");

  ValidationReport report = validate(testing::graph_missing_level("boot"), default_schema());
  const std::vector<ExampleRecord> examples{
      {"login root", std::nullopt, testing::event_with_user("login root", "root"), Embedding{{1.0}}, ExampleOrigin::kManual},
      {"disk full", std::nullopt, testing::event_graph("disk full", "ERROR"), Embedding{{1.0}}, ExampleOrigin::kManual}};
  const auto gen = build_generation_prompt(
      make_log_event("sshd: session opened", std::string("auth"), std::nullopt, 0), examples);
  for (const auto& [name, text] :
       {std::pair<std::string, std::string>{"generation_prompt.txt", testing::render_conversation(gen)},
        {"baseline_prompt.txt",
         testing::render_conversation(build_baseline_prompt(
             make_log_event("kernel: oom-killer invoked", std::nullopt, std::nullopt, 0), default_schema()))}}) {
    const auto diff = testing::check_golden(name, text);
    c.expect(diff.empty(), diff);
  }
  if (c.r.ok) c.r.detail = "system prompt byte-identical; 3 placeholders expanded; goldens match";
  return c.r;
}

Result criterion_sampler() {
  Check c;
  // 100 orthogonal directions, each with a near-duplicate (cosine distance about
  // 5e-5). Cross-direction pairs are at distance exactly 1.
  std::vector<SampleEvent> pool;
  std::vector<Embedding> emb;
  for (std::size_t i = 0; i < 200; ++i) {
    pool.push_back({"event " + std::to_string(i), "fixture.log", i + 1});
    Embedding e;
    e.values.assign(100, 0.0);
    e.values[i % 100] = 1.0;
    if (i >= 100) e.values[(i + 1) % 100] = 0.01;
    emb.push_back(e);
  }
  SamplerConfig cfg;
  cfg.seed = 20240;
  const auto a = sample_dataset(pool, emb, cfg);
  const auto b = sample_dataset(pool, emb, cfg);
  c.expect(a.fewshot.size() == 10 && a.validation.size() == 10 && a.test.size() == 50, "split is not 10/10/50");
  c.expect(a == b, "identical seeds gave different splits");
  std::vector<SampleEvent> all = a.fewshot;
  all.insert(all.end(), a.validation.begin(), a.validation.end());
  all.insert(all.end(), a.test.begin(), a.test.end());
  double min_d = 2.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      min_d = std::min(min_d, cosine_distance(emb[all[i].line_no - 1], emb[all[j].line_no - 1]));
    }
  }
  c.expect(min_d >= cfg.threshold, "selected pair at distance " + fmt("%.4f", min_d));
  cfg.seed = 20241;
  c.expect(!(sample_dataset(pool, emb, cfg) == a), "different seeds gave the same split");
  if (c.r.ok) c.r.detail = "10/10/50, min pairwise distance " + fmt("%.3f", min_d) + ", seed-stable";
  return c.r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Result criterion_end_to_end() {
  Check c;
  testing::TempDir tmp;
  const std::string cli = LOGKG_CLI_PATH;
  double slowest = 0.0;
  for (const char* run : {"a", "b"}) {
    const auto out = tmp / run;
    fs::create_directories(out);
    const auto start = std::chrono::steady_clock::now();
    const auto ingest = cli + " ingest " + q(testing::fixture("ingest/events.log")) + " --examples " +
                        q(testing::fixture("ingest/examples.jsonl")) + " --script " +
                        q(testing::fixture("ingest/script.jsonl")) + " --store " + q(out / "store") +
                        " --dead-letter " + q(out / "dead.jsonl") + " --predictions-dir " + q(out / "pred") +
                        " --summary " + q(out / "summary.json") + " --frozen-clock " +
                        std::to_string(kFrozenClockMs) + " >/dev/null";
    c.expect(testing::run_command(ingest) == 0, "ingest failed");
    const auto eval = cli + " eval --gold " + q(testing::fixture("ingest/gold")) + " --predictions " +
                      q(out / "pred") + " --label ontologx --out-json " + q(out / "metrics.json") + " --out-csv " +
                      q(out / "metrics.csv") + " >/dev/null";
    c.expect(testing::run_command(eval) == 0, "eval failed");
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  if (!c.r.ok) return c.r;
  for (const char* f : {"store/graphs.jsonl", "store/graphs.idx", "dead.jsonl", "summary.json", "metrics.json",
                        "metrics.csv"}) {
    c.expect(testing::read_text(tmp / "a" / f) == testing::read_text(tmp / "b" / f), std::string(f) + " differs");
  }
  c.expect(!testing::read_text(tmp / "a/store/graphs.jsonl").empty(), "store is empty");
  c.expect(!testing::read_text(tmp / "a/dead.jsonl").empty(), "dead-letter log is empty");
  c.expect(slowest < kEndToEndBudgetSec, "run took " + fmt("%.2f", slowest) + " s");
  if (c.r.ok) c.r.detail = "50 events x 2 runs byte-identical, slowest run " + fmt("%.2f", slowest) + " s";
  return c.r;
}

Result criterion_round_trips() {
  Check c;
  testing::Rng rng(9009);
  for (int i = 0; i < kRoundTripJsonGraphs && c.r.ok; ++i) {
    const auto g = testing::random_graph(rng);
    const auto back = parse_graph(serialize_graph(g));
    c.expect(back.graph && *back.graph == g, "JSON round trip changed " + serialize_graph(g));
  }
  for (int i = 0; i < kRoundTripRdfGraphs && c.r.ok; ++i) {
    const auto g = testing::random_well_formed_graph(rng, 6);
    const std::string gid = "g" + std::to_string(i);
    std::string doc;
    for (const auto& line : graph_ntriples(gid, g)) doc += line;
    const auto graphs = reassemble_graphs(parse_ntriples(doc));
    const KnowledgeGraph back = graphs.contains(gid) ? graphs.at(gid) : KnowledgeGraph{};
    c.expect(testing::isomorphic(g, back), "N-Triples round trip not isomorphic for " + serialize_graph(g));
  }
  if (c.r.ok) {
    c.r.detail = std::to_string(kRoundTripJsonGraphs) + " JSON identities, " + std::to_string(kRoundTripRdfGraphs) +
                 " N-Triples isomorphisms";
  }
  return c.r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"validator oracle equivalence", criterion_validator},
      {"MMR oracle equivalence", criterion_mmr},
      {"correction-loop bounds", criterion_correction_loop},
      {"metric correctness", criterion_metrics},
      {"violation-rate convention", criterion_violation_rate},
      {"prompt fidelity", criterion_prompts},
      {"dataset sampler", criterion_sampler},
      {"end-to-end determinism", criterion_end_to_end},
      {"round-trips", criterion_round_trips},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    const auto start = std::chrono::steady_clock::now();
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s [%.2f s]\n", r.ok ? "PASS" : "FAIL", static_cast<int>(i + 1), criteria[i].first.c_str(),
                r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
