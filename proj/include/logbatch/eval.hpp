#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logbatch {

class TokenLedger;

/// Ground-truth template per line_id.
struct GroundTruth {
  std::map<std::size_t, std::string> templates;
};

/// Reads a structured CSV with `Content` and `EventTemplate` columns; line ids
/// are assigned exactly as ingest does.
GroundTruth load_ground_truth(const std::filesystem::path& csv_path);

/// GA: a record counts when the set of records sharing its predicted label
/// equals the set sharing its true label. Inputs are aligned per record.
double group_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);

/// MLA: predicted template equals the true one after whitespace collapsing.
double message_level_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);

/// Levenshtein distance over Unicode code points.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein / max(len); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

enum class EdMode { record_mean, template_pair_mean };
std::string_view to_string(EdMode m);
EdMode parse_ed_mode(std::string_view s);

double edit_distance_score(std::span<const std::string> predicted, std::span<const std::string> truth,
                           EdMode mode = EdMode::record_mean);

struct LedgerSummary {
  std::size_t total_tokens = 0;
  std::size_t invocations = 0;
  bool any_estimated = false;
  bool any_exact = false;

  static LedgerSummary of(const TokenLedger& ledger);
};

struct PredictedRow {
  std::size_t line_id = 0;
  std::string template_text;
};

struct ConfusionRow {
  std::string truth;
  std::string predicted;
  std::size_t count = 0;
};

struct MetricsReport {
  double ga = 0.0;
  double mla = 0.0;
  double ed = 0.0;
  EdMode ed_mode = EdMode::record_mean;
  std::size_t records = 0;
  std::size_t t_total = 0;
  std::size_t invocations = 0;
  // 0 and flagged when there were no invocations.
  double t_invoc = 0.0;
  bool t_invoc_undefined = false;
  bool tokens_estimated = false;
  bool tokens_mixed = false;
  // Truth/predicted pairs that disagree, most frequent first.
  std::vector<ConfusionRow> confusion;
};

/// Throws CoverageError listing predicted line ids that have no truth row.
MetricsReport report(std::span<const PredictedRow> predicted, const LedgerSummary& ledger, const GroundTruth& truth,
                     EdMode mode = EdMode::record_mean);

std::string format_report_text(const MetricsReport& r, bool include_confusion = false);
/// Line-delimited JSON: one summary object, then one object per confusion row.
std::string format_report_jsonl(const MetricsReport& r);

}  // namespace logbatch
