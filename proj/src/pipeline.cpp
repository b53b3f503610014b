#include "logbatch/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <deque>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "logbatch/kernels.hpp"
#include "logbatch/partition.hpp"
#include "logbatch/preprocess.hpp"
#include "logbatch/sampling.hpp"
#include "logbatch/text.hpp"
#include "logbatch/vectorize.hpp"

namespace logbatch {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t chunk, std::uint64_t step) {
  // splitmix64 finaliser
  std::uint64_t z = seed ^ (chunk * 0x9E3779B97F4A7C15ULL) ^ (step * 0xBF58476D1CE4E5B9ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Pending {
  Partition partition;
  int budget = 0;
};

}  // namespace

std::size_t RunManifest::invocations() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.invocations;
  return n;
}

std::size_t RunManifest::cache_hits() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.cache_hits;
  return n;
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<LlmBackend> backend, RuleTable rules)
    : config_(std::move(config)), backend_(std::move(backend)), rules_(std::move(rules)) {
  validate(config_);
  if (!backend_ && config_.llm_backend != BackendKind::fallback_only) {
    throw ConfigError("llm_backend", "llm_backend: a backend instance is required for '" +
                                         std::string(to_string(config_.llm_backend)) + "'");
  }
}

std::vector<ParseOutcome> Pipeline::parse_chunk(const Chunk& chunk, ChunkStats& stats) {
  const auto& records = chunk.records;
  stats.chunk_index = chunk.chunk_index;
  stats.records = records.size();
  std::vector<ParseOutcome> outcomes;
  if (records.empty()) return outcomes;

  std::vector<TokenizedLog> tokenized;
  tokenized.reserve(records.size());
  for (const auto& r : records) tokenized.push_back(preprocess(r, config_.extra_delims));
  const Vocabulary vocab = build_vocabulary(tokenized);
  const std::vector<LogVector> vectors = kernels::parallel::vectorize_all(tokenized, vocab);

  std::vector<Partition> partitions;
  if (config_.partitioning_enabled) {
    partitions = schedule(dbscan(vectors, config_.dbscan_eps, config_.dbscan_min_samples), records);
  } else {
    partitions = passthrough_partition(chunk, static_cast<std::size_t>(config_.batch_size));
  }
  stats.partitions = partitions.size();

  std::deque<Pending> queue;
  for (auto& p : partitions) queue.push_back(Pending{std::move(p), config_.retry_budget});

  const auto k = static_cast<std::size_t>(config_.batch_size);
  std::uint64_t step = 0;
  while (!queue.empty()) {
    Pending item = std::move(queue.front());
    queue.pop_front();
    ++step;

    Partition residual;
    residual.is_outlier_group = item.partition.is_outlier_group;
    if (config_.caching_enabled) {
      for (auto m : item.partition.members) {
        if (auto hit = cache_.lookup(records[m].content)) {
          outcomes.push_back(
              ParseOutcome{records[m], hit->entry.tmpl.text(), std::move(hit->parameters), Provenance::cache_hit, 0});
          ++stats.cache_hits;
        } else {
          residual.members.push_back(m);
        }
      }
    } else {
      residual = item.partition;
    }
    if (residual.members.empty()) continue;

    std::vector<std::string> contents;
    contents.reserve(residual.size());
    for (auto m : residual.members) contents.push_back(records[m].content);
    auto unique = dedupe(contents);
    // A retried partition starts sampling from a different candidate.
    const auto rotation = static_cast<std::size_t>(std::max(0, config_.retry_budget - item.budget));
    if (rotation > 0 && !unique.empty()) {
      std::rotate(unique.begin(), unique.begin() + static_cast<std::ptrdiff_t>(rotation % unique.size()),
                  unique.end());
    }
    std::vector<std::string> candidates;
    std::vector<LogVector> candidate_vectors;
    for (auto u : unique) {
      candidates.push_back(contents[u]);
      candidate_vectors.push_back(vectors[residual.members[u]]);
    }
    const Batch batch =
        sample(config_.sampling_method, candidates, candidate_vectors, k, mix_seed(config_.rng_seed, chunk.chunk_index, step));

    Provenance provenance = Provenance::fallback;
    std::optional<std::string> proposed;
    std::size_t reply_tokens = 0;
    if (backend_ && config_.llm_backend != BackendKind::fallback_only) {
      try {
        const auto reply = query(*backend_, build_prompt(batch), ledger_);
        ++stats.invocations;
        reply_tokens = reply.total_tokens();
        proposed = extract_template(reply.raw_text);
        if (proposed) provenance = Provenance::llm;
      } catch (const BackendUnavailable& e) {
        if (!config_.fallback_enabled) throw RunAborted(e, std::move(outcomes));
      }
    }

    const auto fallback = [&] {
      ++stats.fallbacks;
      provenance = Provenance::fallback;
      return normalize_template(fallback_template(batch.logs), rules_);
    };

    std::string text = proposed ? normalize_template(*proposed, rules_) : std::string();
    if (text.empty()) text = fallback();
    std::optional<LogTemplate> tmpl(std::in_place, text);
    PruneResult pruned = match_and_prune(residual, *tmpl, records);

    if (pruned.matched.members.empty() && provenance == Provenance::llm) {
      ++stats.rejected_templates;
      if (item.budget > 0) {
        queue.push_front(Pending{std::move(residual), item.budget - 1});
        continue;
      }
      tmpl.emplace(fallback());
      pruned = match_and_prune(residual, *tmpl, records);
    }
    if (pruned.matched.members.empty()) {
      // Only reachable if custom rules broke the voting template; the first
      // log as a literal always matches itself.
      tmpl.emplace(records[residual.members[unique.front()]].content);
      pruned = match_and_prune(residual, *tmpl, records);
    }

    std::vector<bool> in_batch(residual.size(), false);
    for (auto bi : batch.indices) in_batch[unique[bi]] = true;
    std::vector<std::size_t> position(records.size(), 0);
    for (std::size_t i = 0; i < residual.size(); ++i) position[residual.members[i]] = i;

    std::vector<Provenance> prov;
    prov.reserve(pruned.matched.size());
    for (auto m : pruned.matched.members) {
      if (provenance == Provenance::fallback) {
        prov.push_back(Provenance::fallback);
      } else if (in_batch[position[m]] || !config_.caching_enabled) {
        prov.push_back(Provenance::llm);
      } else {
        prov.push_back(Provenance::cache_hit);
      }
    }
    auto finalized = finalize(pruned.matched, *tmpl, records, prov);
    for (const auto& o : finalized) {
      if (o.provenance == Provenance::cache_hit) ++stats.cache_hits;
    }
    if (reply_tokens > 0 && provenance == Provenance::llm) {
      for (auto& o : finalized) {
        if (o.provenance == Provenance::llm) {
          o.tokens_charged = reply_tokens;
          break;
        }
      }
    }
    std::move(finalized.begin(), finalized.end(), std::back_inserter(outcomes));

    if (config_.caching_enabled) {
      cache_.insert(*tmpl, records[pruned.matched.members.front()].content, pruned.matched.size());
    }
    if (!pruned.unmatched.members.empty()) {
      queue.push_front(Pending{std::move(pruned.unmatched), config_.retry_budget});
    }
  }
  return outcomes;
}

ParseResult Pipeline::run(const std::vector<LogRecord>& records, const std::string& dataset) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t ledger_mark = ledger_.invocations();
  const auto chunks = chunk(records, config_.chunk_size);
  std::vector<std::vector<ParseOutcome>> per_chunk(chunks.size());
  std::vector<ChunkStats> stats(chunks.size());

  if (config_.workers <= 1 || chunks.size() <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      try {
        per_chunk[i] = parse_chunk(chunks[i], stats[i]);
      } catch (const RunAborted& e) {
        std::vector<ParseOutcome> partial;
        for (std::size_t j = 0; j < i; ++j) partial.insert(partial.end(), per_chunk[j].begin(), per_chunk[j].end());
        partial.insert(partial.end(), e.partial().begin(), e.partial().end());
        throw RunAborted(e, std::move(partial));
      }
    }
  } else {
    std::exception_ptr error;
    std::mutex error_mu;
    const auto n = static_cast<std::ptrdiff_t>(chunks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config_.workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(i);
      try {
        per_chunk[c] = parse_chunk(chunks[c], stats[c]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
    if (error) {
      try {
        std::rethrow_exception(error);
      } catch (const RunAborted& e) {
        std::vector<ParseOutcome> partial;
        for (const auto& pc : per_chunk) partial.insert(partial.end(), pc.begin(), pc.end());
        partial.insert(partial.end(), e.partial().begin(), e.partial().end());
        std::sort(partial.begin(), partial.end(),
                  [](const auto& a, const auto& b) { return a.record.line_id < b.record.line_id; });
        throw RunAborted(e, std::move(partial));
      }
    }
  }

  ParseResult result;
  for (auto& pc : per_chunk) std::move(pc.begin(), pc.end(), std::back_inserter(result.outcomes));
  std::sort(result.outcomes.begin(), result.outcomes.end(),
            [](const auto& a, const auto& b) { return a.record.line_id < b.record.line_id; });
  result.manifest.config = config_;
  result.manifest.dataset = dataset;
  result.manifest.chunks = std::move(stats);
  result.manifest.records = records.size();
  const auto invocations = ledger_.records();
  for (std::size_t i = ledger_mark; i < invocations.size(); ++i) {
    const auto& r = invocations[i];
    result.manifest.ledger.total_tokens += r.prompt_tokens + r.completion_tokens;
    ++result.manifest.ledger.invocations;
    result.manifest.ledger.any_estimated |= r.estimated;
    result.manifest.ledger.any_exact |= !r.estimated;
  }
  result.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::shared_ptr<LlmBackend> make_backend(const PipelineConfig& config,
                                         const std::unordered_map<std::string, std::string>& oracle_truth) {
  switch (config.llm_backend) {
    case BackendKind::fallback_only: return nullptr;
    case BackendKind::offline_oracle:
      if (oracle_truth.empty()) {
        throw ConfigError("llm_backend", "offline_oracle needs ground-truth templates (EventTemplate column)");
      }
      return std::make_shared<OfflineOracleBackend>(oracle_truth);
    case BackendKind::http: {
      auto settings = HttpSettings::from_env();
      settings.temperature = config.temperature;
      settings.max_retries = config.max_retries;
      settings.max_in_flight = config.max_in_flight;
      return std::make_shared<HttpBackend>(std::move(settings));
    }
  }
  return nullptr;
}

std::string format_outcomes(const std::vector<ParseOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) {
    out += std::to_string(o.record.line_id);
    out += '\t';
    out += text::escape_field(o.template_text);
    out += '\t';
    for (std::size_t i = 0; i < o.parameters.size(); ++i) {
      if (i) out += '|';
      out += text::escape_field(o.parameters[i], '|');
    }
    out += '\t';
    out += to_string(o.provenance);
    out += '\n';
  }
  return out;
}

void write_outcomes(const std::filesystem::path& path, const std::vector<ParseOutcome>& outcomes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << format_outcomes(outcomes);
}

std::vector<OutcomeRow> read_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read outcomes file " + path.string());
  std::vector<OutcomeRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = text::split_escaped(line, '\t');
    if (fields.size() != 4) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": expected 4 tab-separated fields");
    }
    OutcomeRow row;
    try {
      row.line_id = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": bad line_id");
    }
    row.template_text = text::unescape_field(fields[1]);
    if (!fields[2].empty()) {
      for (const auto& p : text::split_escaped(fields[2], '|')) row.parameters.push_back(text::unescape_field(p));
    }
    row.provenance = parse_provenance(fields[3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_manifest_json(const RunManifest& m) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : m.chunks) {
    chunks.push_back({{"chunk_index", c.chunk_index},
                      {"records", c.records},
                      {"partitions", c.partitions},
                      {"cache_hits", c.cache_hits},
                      {"invocations", c.invocations},
                      {"fallbacks", c.fallbacks},
                      {"rejected_templates", c.rejected_templates}});
  }
  nlohmann::json j = {
      {"dataset", m.dataset},
      {"config", save_config(m.config)},
      {"records", m.records},
      {"chunks", chunks},
      {"wall_seconds", m.wall_seconds},
      {"prompt_version", std::string(kPromptVersion)},
      {"ledger",
       {{"T_total", m.ledger.total_tokens},
        {"invocations", m.ledger.invocations},
        {"T_invoc", m.ledger.invocations ? static_cast<double>(m.ledger.total_tokens) /
                                               static_cast<double>(m.ledger.invocations)
                                         : 0.0},
        {"any_estimated", m.ledger.any_estimated},
        {"any_exact", m.ledger.any_exact}}},
  };
  return j.dump(2) + "\n";
}

std::string format_ledger_jsonl(const TokenLedger& ledger) {
  std::string out;
  for (const auto& r : ledger.records()) {
    out += nlohmann::json{{"prompt_tokens", r.prompt_tokens},
                          {"completion_tokens", r.completion_tokens},
                          {"backend", r.backend_id},
                          {"estimated", r.estimated},
                          {"attempts", r.attempts},
                          {"batch_size", r.batch_size}}
               .dump() +
           "\n";
  }
  return out;
}

LedgerSummary read_manifest_ledger(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) return {};
  try {
    const auto j = nlohmann::json::parse(in);
    const auto& l = j.at("ledger");
    return {l.at("T_total").get<std::size_t>(), l.at("invocations").get<std::size_t>(),
            l.value("any_estimated", false), l.value("any_exact", false)};
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("bad manifest " + manifest_path.string() + ": " + e.what());
  }
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << content;
}

}  // namespace

ParseResult parse_dataset(Pipeline& pipeline, const std::vector<LogRecord>& records, const std::string& dataset,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ParseResult result;
  try {
    result = pipeline.run(records, dataset);
  } catch (const RunAborted& e) {
    write_outcomes(out_dir / "outcomes.partial.tsv", e.partial());
    pipeline.cache().dump(out_dir / "cache.tsv");
    write_text(out_dir / "ledger.jsonl", format_ledger_jsonl(pipeline.ledger()));
    throw;
  }
  write_outcomes(out_dir / "outcomes.tsv", result.outcomes);
  pipeline.cache().dump(out_dir / "cache.tsv");
  write_text(out_dir / "manifest.json", format_manifest_json(result.manifest));
  write_text(out_dir / "ledger.jsonl", format_ledger_jsonl(pipeline.ledger()));
  save_config(pipeline.config(), out_dir / "config.ini");
  return result;
}

MetricsReport evaluate_run(const std::filesystem::path& outcomes_dir, const GroundTruth& truth, EdMode mode,
                           bool emit_confusion) {
  const auto rows = read_outcomes(outcomes_dir / "outcomes.tsv");
  std::vector<PredictedRow> predicted;
  predicted.reserve(rows.size());
  for (const auto& r : rows) predicted.push_back({r.line_id, r.template_text});
  const auto ledger = read_manifest_ledger(outcomes_dir / "manifest.json");
  auto r = report(predicted, ledger, truth, mode);
  write_text(outcomes_dir / "report.txt", format_report_text(r, emit_confusion));
  write_text(outcomes_dir / "report.jsonl", format_report_jsonl(r));
  return r;
}

}  // namespace logbatch
