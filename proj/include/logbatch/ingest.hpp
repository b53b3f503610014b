#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logbatch {

/// One log message. `content` is the message body with the header removed.
struct LogRecord {
  std::size_t line_id = 0;
  std::string content;
  std::string raw;
};

struct Chunk {
  std::size_t chunk_index = 0;
  std::vector<LogRecord> records;
};

struct IngestResult {
  std::vector<LogRecord> records;
  // Aligned with `records`; present only when the input carried an EventTemplate column.
  std::optional<std::vector<std::string>> truth_templates;
  std::size_t skipped_empty = 0;
  std::size_t header_mismatches = 0;
  std::size_t replaced_bytes = 0;
};

/// Loghub-style CSV with a `Content` column and an optional `EventTemplate`.
/// line_id is the 0-based data row position; blank contents are skipped.
IngestResult load_structured(const std::filesystem::path& path);
IngestResult load_structured_text(std::string_view csv);

/// Raw log lines. `header_pattern` must contain a `(?<Content>...)` capture;
/// an empty pattern keeps whole lines. Lines the pattern misses are kept whole
/// and counted in `header_mismatches`.
IngestResult load_raw(const std::filesystem::path& path, const std::string& header_pattern);
IngestResult load_raw_text(std::string_view text, const std::string& header_pattern);

std::vector<Chunk> chunk(const std::vector<LogRecord>& records, std::size_t chunk_size);

/// RFC 4180 CSV rows. Exposed for tests and the truth loader.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace logbatch
