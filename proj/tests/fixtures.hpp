#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "logbatch/ingest.hpp"
#include "logbatch/llm_client.hpp"

namespace fixtures {

/// Labeled synthetic log data. Every template starts with a keyword unique
/// to it, so no template's regex can match another template's logs, and
/// every template is a fixed point of the default normalisation rules.
struct Dataset {
  std::vector<std::string> templates;
  std::vector<logbatch::LogRecord> records;
  std::vector<std::string> truth;  // aligned with records

  std::unordered_map<std::string, std::string> truth_by_content() const;
  std::string to_csv() const;
};

struct DatasetOptions {
  std::size_t lines = 500;
  std::size_t templates = 10;
  // When false, every variable is a number / hex / IP, so masked tokens of
  // one template coincide and clustering is exact.
  bool opaque_variables = true;
  // Fraction of lines that reuse an earlier line verbatim.
  double repeat_fraction = 0.1;
};

Dataset make_dataset(std::uint64_t seed, const DatasetOptions& options);

/// Two interleaved templates with numeric/IP variables only.
Dataset two_template_dataset(std::size_t lines = 200);

/// `copies` copies of one fixed line.
Dataset repeated_line_dataset(std::size_t copies = 100);

/// Returns the true template only when the batch holds at least two distinct
/// logs; otherwise echoes the first log as its own template.
class NoisyOracleBackend final : public logbatch::LlmBackend {
 public:
  explicit NoisyOracleBackend(std::unordered_map<std::string, std::string> truth) : truth_(std::move(truth)) {}
  logbatch::LlmReply complete(const logbatch::PromptSpec& prompt) override;
  std::string id() const override { return "noisy_oracle"; }

 private:
  std::unordered_map<std::string, std::string> truth_;
};

/// Transport that replays scripted responses and counts calls.
struct ScriptedTransport {
  std::vector<logbatch::HttpResponse> script;
  std::vector<logbatch::HttpRequest> seen;

  logbatch::HttpTransport bind();
};

std::string chat_completion_json(const std::string& content, int prompt_tokens = -1, int completion_tokens = -1);

}  // namespace fixtures
