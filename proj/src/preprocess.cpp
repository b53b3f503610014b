#include "logbatch/preprocess.hpp"

#include <cctype>

#include "logbatch/text.hpp"

namespace logbatch {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_digit(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::size_t scheme_end(std::string_view t) {
  if (t.empty() || !is_alpha(t[0])) return std::string_view::npos;
  std::size_t i = 1;
  while (i < t.size() && (is_alpha(t[i]) || is_digit(t[i]) || t[i] == '+' || t[i] == '.' || t[i] == '-')) ++i;
  if (t.substr(i, 3) == "://") return i + 3;
  return std::string_view::npos;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return true;
}

}  // namespace

bool is_url_like(std::string_view token) { return scheme_end(token) != std::string_view::npos; }

bool is_path_like(std::string_view token) {
  return !is_url_like(token) && token.find('/') != std::string_view::npos;
}

std::vector<std::string> split_refined(std::string_view tok, std::string_view extra) {
  std::vector<std::string> out;
  if (is_url_like(tok) || is_path_like(tok)) {
    out.emplace_back(tok);
    return out;
  }
  const auto is_delim = [&](char c) {
    return kRefinedDelimiters.find(c) != std::string_view::npos ||
           (!extra.empty() && extra.find(c) != std::string_view::npos);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (!is_delim(tok[i])) continue;
    if (i > start) out.emplace_back(tok.substr(start, i - start));
    out.emplace_back(1, tok[i]);
    start = i + 1;
  }
  if (start < tok.size()) out.emplace_back(tok.substr(start));
  return out;
}

std::vector<std::string> tokenize(std::string_view content, std::string_view extra) {
  std::vector<std::string> out;
  for (const auto& ws : text::split_ws(content)) {
    for (auto& piece : split_refined(ws, extra)) out.push_back(std::move(piece));
  }
  return out;
}

bool is_decimal_number(std::string_view t) {
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) t.remove_prefix(1);
  const auto dot = t.find('.');
  if (dot == std::string_view::npos) return all_digits(t);
  return all_digits(t.substr(0, dot)) && all_digits(t.substr(dot + 1));
}

bool is_hex_number(std::string_view t) {
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    for (char c : t.substr(2)) {
      if (!is_hex_digit(c)) return false;
    }
    return true;
  }
  if (t.size() < 8) return false;
  for (char c : t) {
    if (!is_hex_digit(c)) return false;
  }
  return true;
}

bool is_ipv4(std::string_view t) {
  if (const auto colon = t.find(':'); colon != std::string_view::npos) {
    if (!all_digits(t.substr(colon + 1))) return false;
    t = t.substr(0, colon);
  }
  int parts = 0;
  std::size_t start = 0;
  while (true) {
    const auto dot = t.find('.', start);
    const auto part = t.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (part.empty() || part.size() > 3 || !all_digits(part)) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts == 4;
}

bool is_url(std::string_view t) {
  const auto end = scheme_end(t);
  if (end == std::string_view::npos) return false;
  for (char c : t) {
    if (text::is_space(c)) return false;
  }
  return true;
}

const std::vector<MaskRule>& mask_rules() {
  static const std::vector<MaskRule> rules = {
      {"decimal", R"(^[-+]?[0-9]+(\.[0-9]+)?$)", &is_decimal_number},
      {"hex", R"(^(0[xX][0-9a-fA-F]+|[0-9a-fA-F]{8,})$)", &is_hex_number},
      {"ipv4", R"(^[0-9]{1,3}(\.[0-9]{1,3}){3}(:[0-9]+)?$)", &is_ipv4},
      {"url", R"(^[A-Za-z][A-Za-z0-9+.\-]*://\S*$)", &is_url},
  };
  return rules;
}

bool is_maskable(std::string_view token) {
  for (const auto& rule : mask_rules()) {
    if (rule.matches(token)) return true;
  }
  return false;
}

std::string dump_mask_rules() {
  std::string out = "# mask symbol: " + std::string(kMaskSymbol) + "\n";
  out += "# refined delimiters: " + std::string(kRefinedDelimiters) + "\n";
  for (const auto& rule : mask_rules()) {
    out += std::string(rule.name) + "\t" + std::string(rule.pattern) + "\n";
  }
  return out;
}

std::vector<std::string> mask(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(is_maskable(t) ? std::string(kMaskSymbol) : t);
  return out;
}

TokenizedLog preprocess(const LogRecord& record, std::string_view extra) {
  TokenizedLog log;
  log.record = &record;
  log.tokens = tokenize(record.content, extra);
  log.masked_tokens = mask(log.tokens);
  return log;
}

std::string replace_pieces(std::string_view content, std::string_view replacement,
                           bool (*pred)(std::string_view), std::string_view extra) {
  std::string out;
  out.reserve(content.size());
  std::size_t i = 0;
  while (i < content.size()) {
    if (text::is_space(content[i])) {
      out.push_back(content[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < content.size() && !text::is_space(content[j])) ++j;
    for (const auto& piece : split_refined(content.substr(i, j - i), extra)) {
      if (pred(piece)) {
        out += replacement;
      } else {
        out += piece;
      }
    }
    i = j;
  }
  return out;
}

}  // namespace logbatch
