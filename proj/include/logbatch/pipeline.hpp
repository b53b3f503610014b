#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "logbatch/config.hpp"
#include "logbatch/errors.hpp"
#include "logbatch/eval.hpp"
#include "logbatch/ingest.hpp"
#include "logbatch/llm_client.hpp"
#include "logbatch/postprocess.hpp"
#include "logbatch/template_cache.hpp"

namespace logbatch {

struct ChunkStats {
  std::size_t chunk_index = 0;
  std::size_t records = 0;
  std::size_t partitions = 0;
  std::size_t cache_hits = 0;
  std::size_t invocations = 0;
  std::size_t fallbacks = 0;
  std::size_t rejected_templates = 0;
};

struct RunManifest {
  PipelineConfig config;
  std::string dataset;
  std::vector<ChunkStats> chunks;
  double wall_seconds = 0.0;
  LedgerSummary ledger;
  std::size_t records = 0;

  std::size_t invocations() const;
  std::size_t cache_hits() const;
};

struct ParseResult {
  // Sorted by line_id; exactly one per input record.
  std::vector<ParseOutcome> outcomes;
  RunManifest manifest;
};

/// Backend gave up and fallback templating is disabled. Carries whatever was
/// parsed before the failure.
class RunAborted : public BackendUnavailable {
 public:
  RunAborted(const BackendUnavailable& cause, std::vector<ParseOutcome> partial)
      : BackendUnavailable(cause.what(), cause.attempts()), partial_(std::move(partial)) {}
  const std::vector<ParseOutcome>& partial() const noexcept { return partial_; }

 private:
  std::vector<ParseOutcome> partial_;
};

/// End-to-end parser. The cache and the ledger outlive single runs, so a
/// second run over the same data replays from the cache.
class Pipeline {
 public:
  /// `backend` may be null only for BackendKind::fallback_only.
  Pipeline(PipelineConfig config, std::shared_ptr<LlmBackend> backend, RuleTable rules = RuleTable::defaults());

  ParseResult run(const std::vector<LogRecord>& records, const std::string& dataset = {});

  TemplateCache& cache() { return cache_; }
  const TemplateCache& cache() const { return cache_; }
  TokenLedger& ledger() { return ledger_; }
  const PipelineConfig& config() const { return config_; }

 private:
  std::vector<ParseOutcome> parse_chunk(const Chunk& chunk, ChunkStats& stats);

  PipelineConfig config_;
  std::shared_ptr<LlmBackend> backend_;
  RuleTable rules_;
  TemplateCache cache_;
  TokenLedger ledger_;
};

/// Builds the backend named by `config.llm_backend`. The oracle needs a
/// content -> template map; http reads its settings from the environment.
std::shared_ptr<LlmBackend> make_backend(const PipelineConfig& config,
                                         const std::unordered_map<std::string, std::string>& oracle_truth = {});

/// Outcome file: line_id<TAB>template<TAB>param1|param2|...<TAB>provenance.
/// Fields are backslash-escaped; '|' inside a parameter is written as "\|".
void write_outcomes(const std::filesystem::path& path, const std::vector<ParseOutcome>& outcomes);
std::string format_outcomes(const std::vector<ParseOutcome>& outcomes);

struct OutcomeRow {
  std::size_t line_id = 0;
  std::string template_text;
  std::vector<std::string> parameters;
  Provenance provenance = Provenance::llm;
};
std::vector<OutcomeRow> read_outcomes(const std::filesystem::path& path);

std::string format_manifest_json(const RunManifest& m);
std::string format_ledger_jsonl(const TokenLedger& ledger);
LedgerSummary read_manifest_ledger(const std::filesystem::path& manifest_path);

/// Parses, then writes outcomes.tsv, cache.tsv, manifest.json, ledger.jsonl
/// and config.ini under `out_dir`. On abort writes outcomes.partial.tsv and
/// rethrows.
ParseResult parse_dataset(Pipeline& pipeline, const std::vector<LogRecord>& records, const std::string& dataset,
                          const std::filesystem::path& out_dir);

/// Reads outcomes from `outcomes_dir`, scores them against `truth`, writes
/// report.txt and report.jsonl next to them.
MetricsReport evaluate_run(const std::filesystem::path& outcomes_dir, const GroundTruth& truth,
                           EdMode mode = EdMode::record_mean, bool emit_confusion = false);

}  // namespace logbatch
