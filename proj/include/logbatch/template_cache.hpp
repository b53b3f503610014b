#pragma once

#include <boost/regex.hpp>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace logbatch {

inline constexpr std::string_view kWildcard = "<*>";

/// Anchored pattern for a template: literals escaped, whitespace runs become
/// `\s+`, each `<*>` becomes a lazy non-empty capture `(.+?)`.
std::string regex_of(std::string_view template_text);

class LogTemplate {
 public:
  explicit LogTemplate(std::string text);

  const std::string& text() const { return text_; }
  std::size_t wildcard_count() const { return wildcard_count_; }
  const boost::regex& matcher() const { return *matcher_; }

  /// Full-string regex match; the captured parameters on success.
  std::optional<std::vector<std::string>> captures(std::string_view log) const;
  bool matches(std::string_view log) const { return captures(log).has_value(); }

  /// Substitutes parameters for wildcards in order.
  std::string instantiate(const std::vector<std::string>& params) const;

 private:
  std::string text_;
  std::size_t wildcard_count_ = 0;
  std::shared_ptr<const boost::regex> matcher_;
  std::string literal_;
  std::vector<std::string> pieces_;
};

struct CacheEntry {
  LogTemplate tmpl;
  std::string reference_log;
  std::size_t frequency = 1;
  std::uint64_t seq = 0;
  std::size_t reference_tokens = 0;
};

/// Regex match plus a whitespace token-count check against the reference log.
std::optional<std::vector<std::string>> match(const CacheEntry& entry, std::string_view log);

/// Frequency-ordered template store. Lookups probe under a shared lock;
/// frequency bumps and inserts take the exclusive lock.
class TemplateCache {
 public:
  struct Hit {
    CacheEntry entry;
    std::vector<std::string> parameters;
  };

  TemplateCache() = default;
  TemplateCache(const TemplateCache&) = delete;
  TemplateCache& operator=(const TemplateCache&) = delete;

  /// Probes in descending frequency (older first on ties); the first match
  /// wins and its frequency grows by one.
  std::optional<Hit> lookup(std::string_view log);

  /// Adds a template with frequency `matched_count`, or merges into the
  /// entry with the same text. Throws ContractViolation if `reference_log`
  /// does not match.
  CacheEntry insert(const LogTemplate& tmpl, std::string reference_log, std::size_t matched_count = 1);

  std::vector<CacheEntry> entries() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// One entry per line: frequency<TAB>template<TAB>reference_log, fields
  /// backslash-escaped.
  void dump(std::ostream& out) const;
  void dump(const std::filesystem::path& path) const;
  /// Appends entries from a dump (merging duplicate templates).
  void load(std::istream& in);
  void load(const std::filesystem::path& path);

 private:
  void reorder_locked();

  mutable std::shared_mutex mu_;
  std::vector<CacheEntry> entries_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace logbatch
