#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "logbatch/sampling.hpp"

namespace logbatch {

/// Bumped whenever the instruction text changes.
inline constexpr std::string_view kPromptVersion = "logbatch-prompt/1";

std::string_view instruction_text();

struct PromptSpec {
  std::string instruction;
  Batch batch;
  // Batch logs, one per line.
  std::string user_message;
  // Instruction, blank line, then the batch.
  std::string rendered;
};

/// Throws ContractViolation on an empty batch.
PromptSpec build_prompt(const Batch& batch);

/// Rough token count: whitespace-separated words, each punctuation mark
/// counted separately, times 1.3 (rounded up). Only used when a backend
/// reports no usage.
std::size_t estimate_tokens(std::string_view text);

struct LlmReply {
  std::string raw_text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string backend_id;
  bool tokens_estimated = false;
  int attempts = 1;

  std::size_t total_tokens() const { return prompt_tokens + completion_tokens; }
};

struct InvocationRecord {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string backend_id;
  bool estimated = false;
  int attempts = 1;
  std::size_t batch_size = 0;
};

/// Running token account. Thread-safe; all updates go through one mutex.
class TokenLedger {
 public:
  void record(const LlmReply& reply, std::size_t batch_size);

  std::size_t total_tokens() const;
  std::size_t invocations() const;
  /// total_tokens / invocations, or 0 with no invocations.
  double tokens_per_invocation() const;
  bool any_estimated() const;
  bool any_exact() const;
  std::vector<InvocationRecord> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<InvocationRecord> records_;
  std::size_t total_ = 0;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  /// Throws BackendUnavailable when no reply could be obtained.
  virtual LlmReply complete(const PromptSpec& prompt) = 0;
  virtual std::string id() const = 0;
};

/// Test backend answering with the ground-truth template of the batch's
/// first log, wrapped in backticks.
class OfflineOracleBackend final : public LlmBackend {
 public:
  explicit OfflineOracleBackend(std::unordered_map<std::string, std::string> truth_by_content);
  LlmReply complete(const PromptSpec& prompt) override;
  std::string id() const override { return "offline_oracle"; }

 private:
  std::unordered_map<std::string, std::string> truth_;
};

struct HttpRequest {
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  // 0 means the request never completed (connection, TLS, timeout).
  int status = 0;
  std::string body;
  std::string error;
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct HttpSettings {
  std::string base_url;
  std::string api_key;
  std::string model = "gpt-3.5-turbo-0125";
  double temperature = 0.0;
  int max_retries = 3;
  int max_in_flight = 4;
  std::chrono::milliseconds backoff_base{1000};
  std::chrono::seconds timeout{120};

  /// Reads LLM_BASE_URL, LLM_API_KEY and LLM_MODEL; throws ConfigError when
  /// the URL or key is unset.
  static HttpSettings from_env();
};

/// Chat-completions client: POST {base_url}/chat/completions. Transport
/// failures, 429 and 5xx are retried with exponential backoff.
class HttpBackend final : public LlmBackend {
 public:
  explicit HttpBackend(HttpSettings settings, HttpTransport transport = {}, Sleeper sleeper = {});

  LlmReply complete(const PromptSpec& prompt) override;
  std::string id() const override { return "http:" + settings_.model; }

  /// Request body for `prompt`; byte-identical for identical prompts.
  std::string request_body(const PromptSpec& prompt) const;

 private:
  HttpSettings settings_;
  HttpTransport transport_;
  Sleeper sleeper_;
  std::counting_semaphore<1024> in_flight_;
};

/// Default transport backed by cpp-httplib.
HttpTransport make_httplib_transport(std::chrono::seconds timeout);

/// Sends the prompt and records the reply in `ledger`.
LlmReply query(LlmBackend& backend, const PromptSpec& prompt, TokenLedger& ledger);

/// Content of the last backtick-delimited span with `{...}` placeholders
/// turned into `<*>`; absent when there is no non-empty span.
std::optional<std::string> extract_template(std::string_view raw_text);

/// Voting templater for when the backend fails: logs of the most common
/// whitespace-token length are compared column by column, keeping a token
/// only where all of them agree. A single log gets its variable-like pieces
/// replaced by `<*>`.
std::string fallback_template(const std::vector<std::string>& logs);

}  // namespace logbatch
