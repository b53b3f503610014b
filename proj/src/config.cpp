#include "logbatch/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "logbatch/errors.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

std::string_view to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::diversity: return "diversity";
    case SamplingMethod::similarity: return "similarity";
    case SamplingMethod::random: return "random";
  }
  return "?";
}

std::string_view to_string(BackendKind b) {
  switch (b) {
    case BackendKind::http: return "http";
    case BackendKind::offline_oracle: return "offline_oracle";
    case BackendKind::fallback_only: return "fallback_only";
  }
  return "?";
}

SamplingMethod parse_sampling_method(std::string_view s) {
  if (s == "diversity") return SamplingMethod::diversity;
  if (s == "similarity") return SamplingMethod::similarity;
  if (s == "random") return SamplingMethod::random;
  throw ConfigError("sampling_method", "sampling_method: expected diversity|similarity|random, got '" +
                                           std::string(s) + "'");
}

BackendKind parse_backend_kind(std::string_view s) {
  if (s == "http") return BackendKind::http;
  if (s == "offline_oracle" || s == "oracle") return BackendKind::offline_oracle;
  if (s == "fallback_only" || s == "fallback") return BackendKind::fallback_only;
  throw ConfigError("llm_backend", "llm_backend: expected http|offline_oracle|fallback_only, got '" +
                                       std::string(s) + "'");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, std::string_view s) {
  T value{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(key, key + ": not a valid number: '" + std::string(s) + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, key + ": expected true|false, got '" + std::string(s) + "'");
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view)> set;
};

template <typename T>
Field integer_field(const char* section, const char* key, T PipelineConfig::*member) {
  return {section, key, [member](const PipelineConfig& c) { return std::to_string(c.*member); },
          [member, key](PipelineConfig& c, std::string_view v) { c.*member = parse_number<T>(key, v); }};
}

Field real_field(const char* section, const char* key, double PipelineConfig::*member) {
  return {section, key, [member](const PipelineConfig& c) { return format_double(c.*member); },
          [member, key](PipelineConfig& c, std::string_view v) {
            c.*member = parse_number<double>(key, v);
          }};
}

Field bool_field(const char* section, const char* key, bool PipelineConfig::*member) {
  return {section, key, [member](const PipelineConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, key](PipelineConfig& c, std::string_view v) { c.*member = parse_bool(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      integer_field("ingest", "chunk_size", &PipelineConfig::chunk_size),
      integer_field("ingest", "workers", &PipelineConfig::workers),
      {"ingest", "extra_delims", [](const PipelineConfig& c) { return text::escape_field(c.extra_delims); },
       [](PipelineConfig& c, std::string_view v) { c.extra_delims = text::unescape_field(v); }},
      bool_field("partition", "partitioning_enabled", &PipelineConfig::partitioning_enabled),
      real_field("partition", "dbscan_eps", &PipelineConfig::dbscan_eps),
      integer_field("partition", "dbscan_min_samples", &PipelineConfig::dbscan_min_samples),
      bool_field("cache", "caching_enabled", &PipelineConfig::caching_enabled),
      integer_field("sampling", "batch_size", &PipelineConfig::batch_size),
      {"sampling", "sampling_method", [](const PipelineConfig& c) { return std::string(to_string(c.sampling_method)); },
       [](PipelineConfig& c, std::string_view v) { c.sampling_method = parse_sampling_method(v); }},
      integer_field("sampling", "rng_seed", &PipelineConfig::rng_seed),
      {"llm", "llm_backend", [](const PipelineConfig& c) { return std::string(to_string(c.llm_backend)); },
       [](PipelineConfig& c, std::string_view v) { c.llm_backend = parse_backend_kind(v); }},
      real_field("llm", "temperature", &PipelineConfig::temperature),
      integer_field("llm", "max_retries", &PipelineConfig::max_retries),
      integer_field("llm", "max_in_flight", &PipelineConfig::max_in_flight),
      integer_field("postprocess", "retry_budget", &PipelineConfig::retry_budget),
      bool_field("postprocess", "fallback_enabled", &PipelineConfig::fallback_enabled),
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void validate(const PipelineConfig& c) {
  const auto fail = [](const char* key, const std::string& why) {
    throw ConfigError(key, std::string(key) + ": " + why);
  };
  if (c.chunk_size < 1) fail("chunk_size", "must be >= 1");
  if (!(c.dbscan_eps > 0.0) || !std::isfinite(c.dbscan_eps)) fail("dbscan_eps", "must be > 0");
  if (c.dbscan_min_samples < 1) fail("dbscan_min_samples", "must be >= 1");
  if (c.batch_size < 1) fail("batch_size", "must be >= 1");
  if (!(c.temperature >= 0.0) || !std::isfinite(c.temperature)) fail("temperature", "must be >= 0");
  if (c.max_retries < 0) fail("max_retries", "must be >= 0");
  if (c.retry_budget < 0) fail("retry_budget", "must be >= 0");
  if (c.workers < 1) fail("workers", "must be >= 1");
  if (c.max_in_flight < 1) fail("max_in_flight", "must be >= 1");
}

PipelineConfig parse_config(std::string_view text_in, const ConfigOverrides& overrides) {
  PipelineConfig cfg;
  std::string section;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text_in)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("<file>", "line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("<file>", "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError(key, "unknown config key '" + key + "'");
    if (!section.empty() && section != f->section) {
      throw ConfigError(key, key + ": belongs in section [" + f->section + "], found in [" + section + "]");
    }
    f->set(cfg, value);
  }
  for (const auto& [key, value] : overrides) {
    std::string_view bare = key;
    if (const auto dot = bare.find('.'); dot != std::string_view::npos) bare = bare.substr(dot + 1);
    const Field* f = find_field(bare);
    if (f == nullptr) throw ConfigError(key, "unknown config key '" + key + "'");
    f->set(cfg, text::trim(value));
  }
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  if (path.empty()) return parse_config("", overrides);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string save_config(const PipelineConfig& cfg) {
  std::string out = "# logbatch pipeline configuration\n";
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      section = f.section;
      out += "\n[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("<file>", "cannot write config file " + path.string());
  out << save_config(cfg);
}

}  // namespace logbatch
