#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logbatch/ingest.hpp"
#include "logbatch/partition.hpp"
#include "logbatch/template_cache.hpp"

namespace logbatch {

enum class Provenance { cache_hit, llm, fallback };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct ParseOutcome {
  LogRecord record;
  std::string template_text;
  std::vector<std::string> parameters;
  Provenance provenance = Provenance::llm;
  std::size_t tokens_charged = 0;
};

struct NormalizationRule {
  std::string name;
  std::function<std::string(std::string_view)> apply;
};

/// Ordered template-correction rules, applied repeatedly until the text stops
/// changing. Built-in rules:
///   decimal     pure decimal number pieces -> <*>
///   hex         0x-prefixed or >= 8 hex-digit pieces -> <*>
///   collapse    <*> runs joined by nothing, '/', '.' or ':' -> one <*>
///   unquote     '<*>' and "<*>" -> <*>
///   whitespace  whitespace runs -> single space, trimmed
class RuleTable {
 public:
  static RuleTable defaults();
  /// One rule per line: a built-in name, or `regex<TAB>pattern<TAB>replacement`.
  /// Blank lines and lines starting with '#' are ignored.
  static RuleTable parse(std::string_view text);
  static RuleTable load(const std::filesystem::path& path);

  std::string apply(std::string_view text) const;
  std::vector<std::string> names() const;

 private:
  std::vector<NormalizationRule> rules_;
};

std::string normalize_template(std::string_view text, const RuleTable& rules = RuleTable::defaults());

struct PruneResult {
  Partition matched;
  Partition unmatched;
};

/// Splits `partition` into members whose content the template's regex
/// matches and the rest. Order within each side is preserved.
PruneResult match_and_prune(const Partition& partition, const LogTemplate& tmpl, std::span<const LogRecord> records);

/// One outcome per member; `provenance` is aligned with `partition.members`.
/// Throws ContractViolation if a member does not match.
std::vector<ParseOutcome> finalize(const Partition& partition, const LogTemplate& tmpl,
                                   std::span<const LogRecord> records, std::span<const Provenance> provenance);

}  // namespace logbatch
