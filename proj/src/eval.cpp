#include "logbatch/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <set>

#include "logbatch/errors.hpp"
#include "logbatch/ingest.hpp"
#include "logbatch/llm_client.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

namespace {

void check_aligned(std::span<const std::string> a, std::span<const std::string> b, const char* what) {
  if (a.size() != b.size()) {
    throw ContractViolation(std::string(what) + ": predicted and truth cover different record sets");
  }
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 1;
    if (i + len > s.size()) len = 1;
    char32_t cp = len == 1 ? c : static_cast<char32_t>(c & (0xFF >> (len + 1)));
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace

GroundTruth load_ground_truth(const std::filesystem::path& csv_path) {
  const auto data = load_structured(csv_path);
  if (!data.truth_templates) throw SchemaError("truth file has no 'EventTemplate' column: " + csv_path.string());
  GroundTruth gt;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    gt.templates.emplace(data.records[i].line_id, (*data.truth_templates)[i]);
  }
  return gt;
}

double group_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_aligned(predicted, truth, "group_accuracy");
  if (predicted.empty()) return 0.0;
  std::map<std::string_view, std::size_t> pred_size;
  std::map<std::string_view, std::size_t> truth_size;
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> joint;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++pred_size[predicted[i]];
    ++truth_size[truth[i]];
    ++joint[{predicted[i], truth[i]}];
  }
  std::size_t correct = 0;
  for (const auto& [key, n] : joint) {
    if (pred_size[key.first] == n && truth_size[key.second] == n) correct += n;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double message_level_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_aligned(predicted, truth, "message_level_accuracy");
  if (predicted.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (text::collapse_ws(predicted[i]) == text::collapse_ws(truth[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::size_t levenshtein(std::string_view a_in, std::string_view b_in) {
  const auto a = decode_utf8(a_in);
  const auto b = decode_utf8(b_in);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const auto la = decode_utf8(a).size();
  const auto lb = decode_utf8(b).size();
  const auto longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::string_view to_string(EdMode m) {
  return m == EdMode::record_mean ? "record_mean" : "template_pair_mean";
}

EdMode parse_ed_mode(std::string_view s) {
  if (s == "record_mean" || s == "record") return EdMode::record_mean;
  if (s == "template_pair_mean" || s == "template") return EdMode::template_pair_mean;
  throw ConfigError("ed_mode", "ed_mode: expected record_mean|template_pair_mean");
}

double edit_distance_score(std::span<const std::string> predicted, std::span<const std::string> truth, EdMode mode) {
  check_aligned(predicted, truth, "edit_distance_score");
  if (predicted.empty()) return 0.0;
  if (mode == EdMode::record_mean) {
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) sum += edit_similarity(predicted[i], truth[i]);
    return sum / static_cast<double>(predicted.size());
  }
  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (std::size_t i = 0; i < predicted.size(); ++i) pairs.emplace(predicted[i], truth[i]);
  double sum = 0.0;
  for (const auto& [p, t] : pairs) sum += edit_similarity(p, t);
  return sum / static_cast<double>(pairs.size());
}

LedgerSummary LedgerSummary::of(const TokenLedger& ledger) {
  return {ledger.total_tokens(), ledger.invocations(), ledger.any_estimated(), ledger.any_exact()};
}

MetricsReport report(std::span<const PredictedRow> predicted, const LedgerSummary& ledger, const GroundTruth& truth,
                     EdMode mode) {
  std::vector<std::size_t> missing;
  std::vector<std::string> pred;
  std::vector<std::string> gold;
  pred.reserve(predicted.size());
  gold.reserve(predicted.size());
  for (const auto& row : predicted) {
    const auto it = truth.templates.find(row.line_id);
    if (it == truth.templates.end()) {
      missing.push_back(row.line_id);
      continue;
    }
    pred.push_back(row.template_text);
    gold.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string what = "ground truth missing for line_id";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 20); ++i) {
      what += (i ? ", " : " ") + std::to_string(missing[i]);
    }
    if (missing.size() > 20) what += ", ... (" + std::to_string(missing.size()) + " total)";
    throw CoverageError(what, std::move(missing));
  }

  MetricsReport r;
  r.records = pred.size();
  r.ga = group_accuracy(pred, gold);
  r.mla = message_level_accuracy(pred, gold);
  r.ed_mode = mode;
  r.ed = edit_distance_score(pred, gold, mode);
  r.t_total = ledger.total_tokens;
  r.invocations = ledger.invocations;
  r.t_invoc_undefined = ledger.invocations == 0;
  r.t_invoc = r.t_invoc_undefined ? 0.0 : static_cast<double>(r.t_total) / static_cast<double>(r.invocations);
  r.tokens_estimated = ledger.any_estimated;
  r.tokens_mixed = ledger.any_estimated && ledger.any_exact;

  std::map<std::pair<std::string, std::string>, std::size_t> wrong;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (text::collapse_ws(pred[i]) != text::collapse_ws(gold[i])) ++wrong[{gold[i], pred[i]}];
  }
  for (const auto& [k, n] : wrong) r.confusion.push_back({k.first, k.second, n});
  std::stable_sort(r.confusion.begin(), r.confusion.end(),
                   [](const ConfusionRow& a, const ConfusionRow& b) { return a.count > b.count; });
  return r;
}

std::string format_report_text(const MetricsReport& r, bool include_confusion) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "# ed_mode: %s\n", std::string(to_string(r.ed_mode)).c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %10s\n", "metric", "value");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %10zu\n%-12s %10.4f\n%-12s %10.4f\n%-12s %10.4f\n", "records", r.records,
                "GA", r.ga, "MLA", r.mla, "ED", r.ed);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %10zu\n%-12s %10zu\n%-12s %10.2f%s\n", "T_total", r.t_total, "invocations",
                r.invocations, "T_invoc", r.t_invoc, r.t_invoc_undefined ? "  (no invocations)" : "");
  out += buf;
  if (r.tokens_mixed) {
    out += "# token counts mix backend-reported and locally estimated values\n";
  } else if (r.tokens_estimated) {
    out += "# token counts are local estimates\n";
  }
  if (include_confusion && !r.confusion.empty()) {
    out += "\n# mismatches (count, truth -> predicted)\n";
    for (const auto& c : r.confusion) {
      out += std::to_string(c.count) + "\t" + c.truth + "\t->\t" + c.predicted + "\n";
    }
  }
  return out;
}

std::string format_report_jsonl(const MetricsReport& r) {
  nlohmann::json summary = {
      {"kind", "summary"},
      {"records", r.records},
      {"GA", r.ga},
      {"MLA", r.mla},
      {"ED", r.ed},
      {"ed_mode", std::string(to_string(r.ed_mode))},
      {"T_total", r.t_total},
      {"invocations", r.invocations},
      {"T_invoc", r.t_invoc},
      {"T_invoc_undefined", r.t_invoc_undefined},
      {"tokens_estimated", r.tokens_estimated},
      {"tokens_mixed", r.tokens_mixed},
  };
  std::string out = summary.dump() + "\n";
  for (const auto& c : r.confusion) {
    out += nlohmann::json{{"kind", "mismatch"}, {"truth", c.truth}, {"predicted", c.predicted}, {"count", c.count}}
               .dump() +
           "\n";
  }
  return out;
}

}  // namespace logbatch
