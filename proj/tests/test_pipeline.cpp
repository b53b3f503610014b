#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "logbatch/pipeline.hpp"

using namespace logbatch;
namespace fs = std::filesystem;

namespace {

PipelineConfig oracle_config() {
  PipelineConfig c;
  c.llm_backend = BackendKind::offline_oracle;
  return c;
}

std::vector<std::string> predicted(const ParseResult& r) {
  std::vector<std::string> out;
  for (const auto& o : r.outcomes) out.push_back(o.template_text);
  return out;
}

std::size_t count(const ParseResult& r, Provenance p) {
  std::size_t n = 0;
  for (const auto& o : r.outcomes) n += o.provenance == p;
  return n;
}

class FailingBackend final : public LlmBackend {
 public:
  LlmReply complete(const PromptSpec&) override {
    ++calls;
    throw BackendUnavailable("down", 4);
  }
  std::string id() const override { return "failing"; }
  int calls = 0;
};

// Always proposes a template nothing matches.
class WrongBackend final : public LlmBackend {
 public:
  LlmReply complete(const PromptSpec&) override {
    ++calls;
    LlmReply r;
    r.raw_text = "`nothing matches <*> this`";
    r.prompt_tokens = 10;
    r.completion_tokens = 2;
    return r;
  }
  std::string id() const override { return "wrong"; }
  int calls = 0;
};

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("logbatch_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("one repeated line: one invocation, the rest cache hits") {
  const auto d = fixtures::repeated_line_dataset(100);
  Pipeline p(oracle_config(), make_backend(oracle_config(), d.truth_by_content()));
  const auto r = p.run(d.records);
  REQUIRE(r.outcomes.size() == 100);
  CHECK(r.manifest.invocations() == 1);
  CHECK(r.manifest.cache_hits() == 99);
  CHECK(count(r, Provenance::llm) == 1);
  CHECK(count(r, Provenance::cache_hit) == 99);
  CHECK(r.outcomes[0].template_text == "Failed to report <*> to master; giving up");
  CHECK(r.outcomes[7].parameters == std::vector<std::string>{"rdd_5_1"});
}

TEST_CASE("two interleaved templates") {
  const auto d = fixtures::two_template_dataset(200);
  Pipeline p(oracle_config(), make_backend(oracle_config(), d.truth_by_content()));
  const auto r = p.run(d.records);
  CHECK(r.manifest.invocations() == 2);
  CHECK(group_accuracy(predicted(r), d.truth) == 1.0);
  CHECK(message_level_accuracy(predicted(r), d.truth) == 1.0);
}

TEST_CASE("fallback-only recovers both templates") {
  const auto d = fixtures::two_template_dataset(200);
  PipelineConfig c;
  c.llm_backend = BackendKind::fallback_only;
  Pipeline p(c, nullptr);
  const auto r = p.run(d.records);
  CHECK(message_level_accuracy(predicted(r), d.truth) == 1.0);
  CHECK(r.manifest.invocations() == 0);
  CHECK(count(r, Provenance::fallback) == 200);
}

TEST_CASE("caching off costs one invocation per partition") {
  const auto d = fixtures::repeated_line_dataset(100);
  auto c = oracle_config();
  c.chunk_size = 10;
  Pipeline with(c, make_backend(c, d.truth_by_content()));
  const auto a = with.run(d.records);
  c.caching_enabled = false;
  Pipeline without(c, make_backend(c, d.truth_by_content()));
  const auto b = without.run(d.records);
  CHECK(a.manifest.invocations() == 1);
  CHECK(b.manifest.invocations() == 10);
  CHECK(count(b, Provenance::cache_hit) == 0);
  CHECK(without.cache().empty());
}

TEST_CASE("second run replays from the cache") {
  fixtures::DatasetOptions o;
  o.lines = 400;
  const auto d = fixtures::make_dataset(5, o);
  Pipeline p(oracle_config(), make_backend(oracle_config(), d.truth_by_content()));
  const auto first = p.run(d.records);
  CHECK(first.manifest.invocations() > 0);
  const auto second = p.run(d.records);
  CHECK(second.manifest.invocations() == 0);
  CHECK(second.manifest.ledger.total_tokens == 0);
  CHECK(count(second, Provenance::cache_hit) == 400);
  CHECK(predicted(first) == predicted(second));
}

TEST_CASE("oracle closure on a synthetic dataset") {
  fixtures::DatasetOptions o;
  o.lines = 800;
  o.templates = 12;
  const auto d = fixtures::make_dataset(21, o);
  auto c = oracle_config();
  c.chunk_size = 300;
  Pipeline p(c, make_backend(c, d.truth_by_content()));
  const auto r = p.run(d.records);
  CHECK(group_accuracy(predicted(r), d.truth) == 1.0);
  CHECK(message_level_accuracy(predicted(r), d.truth) == 1.0);
  CHECK(edit_distance_score(predicted(r), d.truth) == 1.0);
}

TEST_CASE("runs are deterministic and worker count does not matter") {
  fixtures::DatasetOptions o;
  o.lines = 600;
  const auto d = fixtures::make_dataset(9, o);
  for (auto method : {SamplingMethod::diversity, SamplingMethod::similarity, SamplingMethod::random}) {
    auto c = oracle_config();
    c.chunk_size = 150;
    c.sampling_method = method;
    c.caching_enabled = false;
    Pipeline a(c, make_backend(c, d.truth_by_content()));
    Pipeline b(c, make_backend(c, d.truth_by_content()));
    c.workers = 3;
    Pipeline w(c, make_backend(c, d.truth_by_content()));
    const auto ra = a.run(d.records);
    const auto rb = b.run(d.records);
    const auto rw = w.run(d.records);
    CHECK(predicted(ra) == predicted(rb));
    CHECK(predicted(ra) == predicted(rw));
    CHECK(ra.manifest.ledger.total_tokens == rb.manifest.ledger.total_tokens);
    CHECK(ra.manifest.ledger.total_tokens == rw.manifest.ledger.total_tokens);
  }
}

TEST_CASE("no partitioning still parses everything") {
  const auto d = fixtures::two_template_dataset(60);
  auto c = oracle_config();
  c.partitioning_enabled = false;
  Pipeline p(c, make_backend(c, d.truth_by_content()));
  const auto r = p.run(d.records);
  CHECK(message_level_accuracy(predicted(r), d.truth) == 1.0);
}

TEST_CASE("tokens charged add up to the ledger") {
  fixtures::DatasetOptions o;
  o.lines = 500;
  const auto d = fixtures::make_dataset(13, o);
  Pipeline p(oracle_config(), make_backend(oracle_config(), d.truth_by_content()));
  const auto r = p.run(d.records);
  std::size_t charged = 0;
  for (const auto& out : r.outcomes) charged += out.tokens_charged;
  CHECK(charged == r.manifest.ledger.total_tokens);
  CHECK(charged == p.ledger().total_tokens());
  std::size_t sum = 0;
  for (const auto& rec : p.ledger().records()) sum += rec.prompt_tokens + rec.completion_tokens;
  CHECK(sum == charged);
}

TEST_CASE("rejected templates exhaust the retry budget then fall back") {
  const auto d = fixtures::two_template_dataset(40);
  PipelineConfig c;
  c.retry_budget = 3;
  auto backend = std::make_shared<WrongBackend>();
  Pipeline p(c, backend);
  const auto r = p.run(d.records);
  // First attempt plus three retries for each of the two partitions.
  CHECK(backend->calls == 2 * 4);
  CHECK(count(r, Provenance::fallback) == 40);
  CHECK(message_level_accuracy(predicted(r), d.truth) == 1.0);
  CHECK(r.manifest.chunks.at(0).rejected_templates == 8);
}

TEST_CASE("backend failure without fallback aborts with partial output") {
  const auto d = fixtures::two_template_dataset(20);
  PipelineConfig c;
  c.fallback_enabled = false;
  Pipeline p(c, std::make_shared<FailingBackend>());
  CHECK_THROWS_AS(p.run(d.records), RunAborted);

  c.fallback_enabled = true;
  auto failing = std::make_shared<FailingBackend>();
  Pipeline q(c, failing);
  const auto r = q.run(d.records);
  CHECK(count(r, Provenance::fallback) == 20);
  CHECK(failing->calls == 2);
}

TEST_CASE("outcome files round-trip") {
  const auto dir = temp_dir("outcomes");
  ParseOutcome o;
  o.record = {3, "x", "x"};
  o.template_text = "a\t<*> | <*>";
  o.parameters = {"p|q", "back\\slash"};
  o.provenance = Provenance::cache_hit;
  write_outcomes(dir / "o.tsv", {o});
  const auto rows = read_outcomes(dir / "o.tsv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].line_id == 3);
  CHECK(rows[0].template_text == o.template_text);
  CHECK(rows[0].parameters == o.parameters);
  CHECK(rows[0].provenance == Provenance::cache_hit);
  fs::remove_all(dir);
}

TEST_CASE("parse_dataset and evaluate_run") {
  const auto dir = temp_dir("run");
  const auto d = fixtures::two_template_dataset(100);
  Pipeline p(oracle_config(), make_backend(oracle_config(), d.truth_by_content()));
  parse_dataset(p, d.records, "two", dir);
  for (const char* f : {"outcomes.tsv", "cache.tsv", "manifest.json", "ledger.jsonl", "config.ini"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(load_config(dir / "config.ini") == oracle_config());
  const auto ledger = read_manifest_ledger(dir / "manifest.json");
  CHECK(ledger.invocations == 2);

  GroundTruth truth;
  for (std::size_t i = 0; i < d.records.size(); ++i) truth.templates[d.records[i].line_id] = d.truth[i];
  const auto m = evaluate_run(dir, truth);
  CHECK(m.ga == 1.0);
  CHECK(m.mla == 1.0);
  CHECK(m.invocations == 2);
  CHECK(m.t_invoc == static_cast<double>(m.t_total) / 2.0);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "report.jsonl"));

  truth.templates.erase(17);
  CHECK_THROWS_AS(evaluate_run(dir, truth), CoverageError);
  fs::remove_all(dir);
}
