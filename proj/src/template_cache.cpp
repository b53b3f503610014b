#include "logbatch/template_cache.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>

#include "logbatch/errors.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

namespace {

constexpr std::string_view kRegexMeta = ".[]{}()\\*+?|^$";

void append_literal(std::string& out, std::string_view lit) {
  bool in_space = false;
  for (char c : lit) {
    if (text::is_space(c)) {
      if (!in_space) out += "\\s+";
      in_space = true;
      continue;
    }
    in_space = false;
    if (kRegexMeta.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
}

// Every whitespace run becomes one space; nothing is trimmed.
std::string squeeze_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (text::is_space(c)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  return out;
}

bool squeezed_equal(std::string_view log, std::string_view squeezed) {
  std::size_t j = 0;
  bool in_space = false;
  for (char c : log) {
    if (text::is_space(c)) {
      if (in_space) continue;
      in_space = true;
      c = ' ';
    } else {
      in_space = false;
    }
    if (j == squeezed.size() || squeezed[j] != c) return false;
    ++j;
  }
  return j == squeezed.size();
}

}  // namespace

std::string regex_of(std::string_view tmpl) {
  std::string out = "^";
  std::size_t pos = 0;
  while (true) {
    const auto next = tmpl.find(kWildcard, pos);
    append_literal(out, tmpl.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    out += "(.+?)";
    pos = next + kWildcard.size();
  }
  out += "$";
  return out;
}

LogTemplate::LogTemplate(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw ContractViolation("LogTemplate: empty template text");
  for (std::size_t pos = text_.find(kWildcard); pos != std::string::npos; pos = text_.find(kWildcard, pos + 3)) {
    ++wildcard_count_;
  }
  matcher_ = std::make_shared<const boost::regex>(regex_of(text_), boost::regex::perl);
  if (wildcard_count_ == 0) {
    literal_ = squeeze_ws(text_);
    return;
  }
  std::size_t pos = 0;
  while (true) {
    const auto next = text_.find(kWildcard, pos);
    const auto segment = std::string_view(text_).substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    for (auto& piece : text::split_ws(segment)) pieces_.push_back(std::move(piece));
    if (next == std::string::npos) break;
    pos = next + kWildcard.size();
  }
}

std::optional<std::vector<std::string>> LogTemplate::captures(std::string_view log) const {
  // Same answer as the regex, which for a literal is just whitespace-run equality.
  if (wildcard_count_ == 0) {
    if (!squeezed_equal(log, literal_)) return std::nullopt;
    return std::vector<std::string>{};
  }
  // Cheap rejection: every literal piece has to occur, in order.
  std::size_t at = 0;
  for (const auto& piece : pieces_) {
    at = log.find(piece, at);
    if (at == std::string_view::npos) return std::nullopt;
    at += piece.size();
  }
  boost::match_results<std::string_view::const_iterator> m;
  try {
    if (!boost::regex_match(log.begin(), log.end(), m, *matcher_)) return std::nullopt;
  } catch (const std::runtime_error&) {
    // Backtracking limit hit; treat as no match.
    return std::nullopt;
  }
  std::vector<std::string> params;
  params.reserve(wildcard_count_);
  for (std::size_t i = 1; i < m.size(); ++i) params.push_back(m[static_cast<int>(i)].str());
  return params;
}

std::string LogTemplate::instantiate(const std::vector<std::string>& params) const {
  if (params.size() != wildcard_count_) throw ContractViolation("instantiate: parameter count mismatch");
  std::string out;
  std::size_t pos = 0;
  for (const auto& p : params) {
    const auto next = text_.find(kWildcard, pos);
    out.append(text_, pos, next - pos);
    out += p;
    pos = next + kWildcard.size();
  }
  out.append(text_, pos);
  return out;
}

std::optional<std::vector<std::string>> match(const CacheEntry& entry, std::string_view log) {
  if (text::count_ws_tokens(log) != entry.reference_tokens) return std::nullopt;
  return entry.tmpl.captures(log);
}

void TemplateCache::reorder_locked() {
  std::sort(entries_.begin(), entries_.end(), [](const CacheEntry& a, const CacheEntry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.seq < b.seq;
  });
}

std::optional<TemplateCache::Hit> TemplateCache::lookup(std::string_view log) {
  std::uint64_t seq = 0;
  std::vector<std::string> params;
  {
    std::shared_lock lock(mu_);
    const auto tokens = text::count_ws_tokens(log);
    bool found = false;
    for (const auto& e : entries_) {
      if (e.reference_tokens != tokens) continue;
      if (auto p = e.tmpl.captures(log)) {
        seq = e.seq;
        params = std::move(*p);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  std::unique_lock lock(mu_);
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const CacheEntry& e) { return e.seq == seq; });
  ++it->frequency;
  Hit hit{*it, std::move(params)};
  // Frequency only grew, so only earlier neighbours can be out of order.
  while (it != entries_.begin()) {
    auto prev = std::prev(it);
    if (prev->frequency > it->frequency || (prev->frequency == it->frequency && prev->seq < it->seq)) break;
    std::iter_swap(prev, it);
    it = prev;
  }
  return hit;
}

CacheEntry TemplateCache::insert(const LogTemplate& tmpl, std::string reference_log, std::size_t matched_count) {
  if (!tmpl.matches(reference_log)) {
    throw ContractViolation("cache insert: reference log does not match template '" + tmpl.text() + "'");
  }
  matched_count = std::max<std::size_t>(matched_count, 1);
  std::unique_lock lock(mu_);
  for (auto& e : entries_) {
    if (e.tmpl.text() == tmpl.text()) {
      e.frequency += matched_count;
      CacheEntry copy = e;
      reorder_locked();
      return copy;
    }
  }
  CacheEntry entry{tmpl, std::move(reference_log), matched_count, next_seq_++, 0};
  entry.reference_tokens = text::count_ws_tokens(entry.reference_log);
  entries_.push_back(entry);
  reorder_locked();
  return entry;
}

std::vector<CacheEntry> TemplateCache::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

std::size_t TemplateCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void TemplateCache::dump(std::ostream& out) const {
  std::shared_lock lock(mu_);
  for (const auto& e : entries_) {
    out << e.frequency << '\t' << text::escape_field(e.tmpl.text()) << '\t' << text::escape_field(e.reference_log)
        << '\n';
  }
}

void TemplateCache::dump(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write cache file " + path.string());
  dump(out);
}

void TemplateCache::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = text::split_escaped(line, '\t');
    if (fields.size() != 3) {
      throw SchemaError("cache line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    std::size_t freq = 0;
    try {
      freq = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw SchemaError("cache line " + std::to_string(lineno) + ": bad frequency '" + fields[0] + "'");
    }
    LogTemplate tmpl(text::unescape_field(fields[1]));
    try {
      insert(tmpl, text::unescape_field(fields[2]), freq);
    } catch (const ContractViolation& e) {
      throw SchemaError("cache line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void TemplateCache::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read cache file " + path.string());
  load(in);
}

}  // namespace logbatch
