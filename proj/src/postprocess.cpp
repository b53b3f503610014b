#include "logbatch/postprocess.hpp"

#include <boost/regex.hpp>
#include <fstream>
#include <sstream>

#include "logbatch/errors.hpp"
#include "logbatch/preprocess.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::cache_hit: return "cache_hit";
    case Provenance::llm: return "llm";
    case Provenance::fallback: return "fallback";
  }
  return "?";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "cache_hit") return Provenance::cache_hit;
  if (s == "llm") return Provenance::llm;
  if (s == "fallback") return Provenance::fallback;
  throw SchemaError("unknown provenance '" + std::string(s) + "'");
}

namespace {

NormalizationRule regex_rule(std::string name, const std::string& pattern, std::string replacement) {
  auto re = std::make_shared<const boost::regex>(pattern, boost::regex::perl);
  return {std::move(name), [re, replacement = std::move(replacement)](std::string_view s) {
            return boost::regex_replace(std::string(s), *re, replacement);
          }};
}

NormalizationRule builtin(std::string_view name) {
  if (name == "decimal") {
    return {"decimal", [](std::string_view s) { return replace_pieces(s, kWildcard, &is_decimal_number); }};
  }
  if (name == "hex") {
    return {"hex", [](std::string_view s) { return replace_pieces(s, kWildcard, &is_hex_number); }};
  }
  if (name == "collapse") return regex_rule("collapse", R"(<\*>(?:[/.:]?<\*>)+)", "<*>");
  if (name == "unquote") return regex_rule("unquote", R"((['"])<\*>\1)", "<*>");
  if (name == "whitespace") {
    return {"whitespace", [](std::string_view s) { return text::collapse_ws(s); }};
  }
  throw ConfigError("rules", "unknown normalization rule '" + std::string(name) + "'");
}

}  // namespace

RuleTable RuleTable::defaults() {
  static const RuleTable table = [] {
    RuleTable t;
    for (auto name : {"decimal", "hex", "collapse", "unquote", "whitespace"}) t.rules_.push_back(builtin(name));
    return t;
  }();
  return table;
}

RuleTable RuleTable::parse(std::string_view text_in) {
  RuleTable t;
  std::istringstream in{std::string(text_in)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (trimmed.rfind("regex\t", 0) == 0) {
      const auto fields = text::split_escaped(trimmed, '\t');
      if (fields.size() != 3) throw ConfigError("rules", "regex rule needs pattern and replacement: " + line);
      try {
        t.rules_.push_back(regex_rule("regex:" + fields[1], text::unescape_field(fields[1]),
                                      text::unescape_field(fields[2])));
      } catch (const boost::regex_error& e) {
        throw ConfigError("rules", "bad rule pattern '" + fields[1] + "': " + e.what());
      }
      continue;
    }
    t.rules_.push_back(builtin(trimmed));
  }
  return t;
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("rules", "cannot read rule file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::string> RuleTable::names() const {
  std::vector<std::string> out;
  for (const auto& r : rules_) out.push_back(r.name);
  return out;
}

std::string RuleTable::apply(std::string_view text_in) const {
  std::string current(text_in);
  // Fixpoint iteration makes the result idempotent; the cap guards
  // against user rules that never settle.
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = current;
    for (const auto& rule : rules_) next = rule.apply(next);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::string normalize_template(std::string_view text_in, const RuleTable& rules) { return rules.apply(text_in); }

PruneResult match_and_prune(const Partition& partition, const LogTemplate& tmpl, std::span<const LogRecord> records) {
  PruneResult out;
  out.matched.is_outlier_group = partition.is_outlier_group;
  out.unmatched.is_outlier_group = partition.is_outlier_group;
  for (auto m : partition.members) {
    if (tmpl.matches(records[m].content)) {
      out.matched.members.push_back(m);
    } else {
      out.unmatched.members.push_back(m);
    }
  }
  return out;
}

std::vector<ParseOutcome> finalize(const Partition& partition, const LogTemplate& tmpl,
                                   std::span<const LogRecord> records, std::span<const Provenance> provenance) {
  if (provenance.size() != partition.members.size()) {
    throw ContractViolation("finalize: provenance not aligned with members");
  }
  std::vector<ParseOutcome> out;
  out.reserve(partition.members.size());
  for (std::size_t i = 0; i < partition.members.size(); ++i) {
    const auto& rec = records[partition.members[i]];
    auto params = tmpl.captures(rec.content);
    if (!params) {
      throw ContractViolation("finalize: line " + std::to_string(rec.line_id) + " does not match '" + tmpl.text() +
                              "'");
    }
    out.push_back(ParseOutcome{rec, tmpl.text(), std::move(*params), provenance[i], 0});
  }
  return out;
}

}  // namespace logbatch
