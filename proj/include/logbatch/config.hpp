#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace logbatch {

enum class SamplingMethod { diversity, similarity, random };
enum class BackendKind { http, offline_oracle, fallback_only };

std::string_view to_string(SamplingMethod m);
std::string_view to_string(BackendKind b);
SamplingMethod parse_sampling_method(std::string_view s);
BackendKind parse_backend_kind(std::string_view s);

/// Pipeline settings. Immutable once loaded and safe to share between
/// chunk workers.
struct PipelineConfig {
  std::size_t chunk_size = 2000;
  double dbscan_eps = 0.5;
  int dbscan_min_samples = 5;
  int batch_size = 10;
  SamplingMethod sampling_method = SamplingMethod::diversity;
  double temperature = 0.0;
  bool partitioning_enabled = true;
  bool caching_enabled = true;
  BackendKind llm_backend = BackendKind::http;
  int max_retries = 3;
  std::uint64_t rng_seed = 0;
  // Template rejections tolerated per partition before the voting templater takes over.
  int retry_budget = 3;
  int workers = 1;
  int max_in_flight = 4;
  bool fallback_enabled = true;
  // Additional refined delimiters for tokenization, e.g. "|@".
  std::string extra_delims;

  bool operator==(const PipelineConfig&) const = default;
};

using ConfigOverrides = std::map<std::string, std::string>;

/// Throws ConfigError naming the first offending key.
void validate(const PipelineConfig& cfg);

/// Parses the sectioned key = value format. Overrides (bare key names)
/// win over file values, which win over defaults. Unknown keys are rejected.
PipelineConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Empty path means "defaults plus overrides".
PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

std::string save_config(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Every recognised key, in file order.
std::vector<std::string> config_keys();

}  // namespace logbatch
