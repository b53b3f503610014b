#include "logbatch/llm_client.hpp"

#include <algorithm>
#include <cctype>

#include "logbatch/errors.hpp"
#include "logbatch/preprocess.hpp"
#include "logbatch/template_cache.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

std::string_view instruction_text() {
  static const std::string text =
      "You will be provided with a list of log messages. Your task is log parsing: identify the "
      "single log template they share by abstracting every dynamic variable (identifiers, numbers, "
      "paths, addresses, sizes, names that change between runs) into {placeholder}, while keeping "
      "every constant keyword unchanged.\n"
      "Input: one log message per line. All lines are instances of the same template.\n"
      "Output: exactly one template wrapped in backticks, for example `Connected to {host} in {time}`.\n"
      "Some logs contain no variables at all; in that case return the log unchanged. Do not turn "
      "constant words into placeholders.";
  return text;
}

PromptSpec build_prompt(const Batch& batch) {
  if (batch.logs.empty()) throw ContractViolation("build_prompt: empty batch");
  PromptSpec p;
  p.instruction = std::string(instruction_text());
  p.batch = batch;
  for (std::size_t i = 0; i < batch.logs.size(); ++i) {
    if (i) p.user_message.push_back('\n');
    p.user_message += batch.logs[i];
  }
  p.rendered = p.instruction + "\n\n" + p.user_message;
  return p;
}

std::size_t estimate_tokens(std::string_view s) {
  std::size_t segments = 0;
  bool in_word = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (text::is_space(ch)) {
      in_word = false;
    } else if (std::isalnum(c) || c == '_' || c >= 0x80) {
      if (!in_word) ++segments;
      in_word = true;
    } else {
      ++segments;
      in_word = false;
    }
  }
  return (segments * 13 + 9) / 10;
}

void TokenLedger::record(const LlmReply& reply, std::size_t batch_size) {
  std::lock_guard lock(mu_);
  records_.push_back(InvocationRecord{reply.prompt_tokens, reply.completion_tokens, reply.backend_id,
                                      reply.tokens_estimated, reply.attempts, batch_size});
  total_ += reply.total_tokens();
}

std::size_t TokenLedger::total_tokens() const {
  std::lock_guard lock(mu_);
  return total_;
}

std::size_t TokenLedger::invocations() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

double TokenLedger::tokens_per_invocation() const {
  std::lock_guard lock(mu_);
  if (records_.empty()) return 0.0;
  return static_cast<double>(total_) / static_cast<double>(records_.size());
}

bool TokenLedger::any_estimated() const {
  std::lock_guard lock(mu_);
  return std::any_of(records_.begin(), records_.end(), [](const auto& r) { return r.estimated; });
}

bool TokenLedger::any_exact() const {
  std::lock_guard lock(mu_);
  return std::any_of(records_.begin(), records_.end(), [](const auto& r) { return !r.estimated; });
}

std::vector<InvocationRecord> TokenLedger::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

OfflineOracleBackend::OfflineOracleBackend(std::unordered_map<std::string, std::string> truth_by_content)
    : truth_(std::move(truth_by_content)) {}

LlmReply OfflineOracleBackend::complete(const PromptSpec& prompt) {
  const auto& first = prompt.batch.logs.front();
  const auto it = truth_.find(first);
  if (it == truth_.end()) throw BackendUnavailable("offline oracle has no template for '" + first + "'", 1);
  LlmReply reply;
  reply.raw_text = "`" + it->second + "`";
  reply.prompt_tokens = estimate_tokens(prompt.rendered);
  reply.completion_tokens = estimate_tokens(reply.raw_text);
  reply.tokens_estimated = true;
  reply.backend_id = id();
  return reply;
}

LlmReply query(LlmBackend& backend, const PromptSpec& prompt, TokenLedger& ledger) {
  LlmReply reply = backend.complete(prompt);
  ledger.record(reply, prompt.batch.logs.size());
  return reply;
}

std::optional<std::string> extract_template(std::string_view raw) {
  // Runs of backticks count as one locator so ``` fences pair up too.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] != '`') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && raw[j] == '`') ++j;
    runs.emplace_back(i, j);
    i = j;
  }
  if (runs.size() < 2) return std::nullopt;
  const std::size_t last_pair = (runs.size() / 2) * 2 - 2;
  const auto begin = runs[last_pair].second;
  const auto end = runs[last_pair + 1].first;
  std::string_view span = raw.substr(begin, end - begin);

  // Multi-line spans (fenced blocks): the template is the last non-empty line.
  if (span.find('\n') != std::string_view::npos) {
    std::string_view last;
    std::size_t pos = 0;
    while (pos <= span.size()) {
      auto nl = span.find('\n', pos);
      if (nl == std::string_view::npos) nl = span.size();
      const auto line = text::trim(span.substr(pos, nl - pos));
      if (!line.empty()) last = line;
      pos = nl + 1;
    }
    span = last;
  }

  std::string out;
  for (std::size_t i = 0; i < span.size(); ++i) {
    if (span[i] == '{') {
      const auto close = span.find('}', i + 1);
      if (close != std::string_view::npos && span.substr(i + 1, close - i - 1).find('{') == std::string_view::npos) {
        out += kWildcard;
        i = close;
        continue;
      }
    }
    out.push_back(span[i]);
  }
  const auto trimmed = text::trim(out);
  if (trimmed.empty()) return std::nullopt;
  return std::string(trimmed);
}

std::string fallback_template(const std::vector<std::string>& logs) {
  if (logs.empty()) throw ContractViolation("fallback_template: empty batch");
  std::vector<std::vector<std::string>> toks;
  toks.reserve(logs.size());
  for (const auto& l : logs) toks.push_back(text::split_ws(l));

  std::map<std::size_t, std::size_t> by_len;
  for (const auto& t : toks) ++by_len[t.size()];
  std::size_t best_len = toks.front().size();
  for (const auto& t : toks) {
    if (by_len[t.size()] > by_len[best_len]) best_len = t.size();
  }
  std::vector<const std::vector<std::string>*> group;
  std::size_t first = logs.size();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].size() != best_len) continue;
    if (first == logs.size()) first = i;
    group.push_back(&toks[i]);
  }
  if (group.size() == 1) {
    return std::string(text::trim(replace_pieces(logs[first], kWildcard, &is_maskable)));
  }
  std::string out;
  for (std::size_t col = 0; col < best_len; ++col) {
    if (col) out.push_back(' ');
    const auto& token = (*group.front())[col];
    if (std::all_of(group.begin(), group.end(), [&](const auto* t) { return (*t)[col] == token; })) {
      out += token;
      continue;
    }
    // Disagreement: vote on refined pieces when every token splits alike.
    std::vector<std::vector<std::string>> pieces;
    for (const auto* t : group) pieces.push_back(split_refined((*t)[col]));
    const bool aligned = std::all_of(pieces.begin(), pieces.end(),
                                     [&](const auto& p) { return p.size() == pieces.front().size(); });
    if (!aligned || pieces.front().size() == 1) {
      out += kWildcard;
      continue;
    }
    for (std::size_t k = 0; k < pieces.front().size(); ++k) {
      const auto& piece = pieces.front()[k];
      const bool same = std::all_of(pieces.begin(), pieces.end(), [&](const auto& p) { return p[k] == piece; });
      out += same ? piece : std::string(kWildcard);
    }
  }
  return out;
}

}  // namespace logbatch
