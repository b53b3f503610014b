#include "logbatch/ingest.hpp"

#include <boost/regex.hpp>
#include <fstream>
#include <sstream>

#include "logbatch/errors.hpp"
#include "logbatch/text.hpp"

namespace logbatch {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Message bodies are single-line by definition.
std::string flatten_newlines(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    // A bare empty line is not a row; a quoted empty field is.
    const bool started = field_started;
    end_field();
    if (started || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
    row.clear();
  };
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw SchemaError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

IngestResult load_structured_text(std::string_view csv) {
  IngestResult result;
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw SchemaError("CSV is empty: missing header row with a 'Content' column");
  const auto& header = rows.front();
  std::optional<std::size_t> content_col;
  std::optional<std::size_t> template_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = text::trim(header[c]);
    if (name == "Content") content_col = c;
    if (name == "EventTemplate") template_col = c;
  }
  if (!content_col) throw SchemaError("CSV schema error: missing column 'Content'");
  if (template_col) result.truth_templates.emplace();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line_id = r - 1;
    if (*content_col >= row.size()) {
      throw SchemaError("CSV row " + std::to_string(r + 1) + ": missing 'Content' field");
    }
    auto content = text::sanitize_utf8(row[*content_col], result.replaced_bytes);
    content = std::string(text::trim(flatten_newlines(std::move(content))));
    if (content.empty()) {
      ++result.skipped_empty;
      continue;
    }
    LogRecord rec;
    rec.line_id = line_id;
    rec.raw = content;
    rec.content = std::move(content);
    result.records.push_back(std::move(rec));
    if (template_col) {
      std::string tmpl = *template_col < row.size() ? row[*template_col] : std::string();
      tmpl = text::sanitize_utf8(tmpl, result.replaced_bytes);
      result.truth_templates->push_back(std::string(text::trim(flatten_newlines(std::move(tmpl)))));
    }
  }
  return result;
}

IngestResult load_structured(const std::filesystem::path& path) {
  return load_structured_text(read_file(path));
}

IngestResult load_raw_text(std::string_view input, const std::string& header_pattern) {
  IngestResult result;
  std::optional<boost::regex> header;
  if (!header_pattern.empty()) {
    try {
      header.emplace(header_pattern, boost::regex::perl);
    } catch (const boost::regex_error& e) {
      throw SchemaError("invalid header pattern: " + std::string(e.what()));
    }
    // Boost exposes no name enumeration; look for the group syntax instead.
    const bool has_content = header_pattern.find("(?<Content>") != std::string::npos ||
                  header_pattern.find("(?P<Content>") != std::string::npos ||
                  header_pattern.find("(?'Content'") != std::string::npos;
    if (!has_content) throw SchemaError("header pattern needs a named capture (?<Content>...)");
  }
  std::size_t line_id = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto nl = input.find('\n', pos);
    if (nl == std::string_view::npos) nl = input.size();
    auto line = input.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    const std::size_t id = line_id++;
    auto raw = text::sanitize_utf8(line, result.replaced_bytes);
    if (text::trim(raw).empty()) {
      ++result.skipped_empty;
      continue;
    }
    std::string content = raw;
    if (header) {
      boost::smatch m;
      if (boost::regex_match(raw, m, *header)) {
        content = m["Content"].str();
      } else {
        ++result.header_mismatches;
      }
    }
    content = std::string(text::trim(content));
    if (content.empty()) {
      ++result.skipped_empty;
      continue;
    }
    result.records.push_back(LogRecord{id, std::move(content), std::move(raw)});
  }
  return result;
}

IngestResult load_raw(const std::filesystem::path& path, const std::string& header_pattern) {
  return load_raw_text(read_file(path), header_pattern);
}

std::vector<Chunk> chunk(const std::vector<LogRecord>& records, std::size_t chunk_size) {
  if (chunk_size == 0) throw ContractViolation("chunk_size must be >= 1");
  std::vector<Chunk> chunks;
  for (std::size_t start = 0; start < records.size(); start += chunk_size) {
    const std::size_t end = std::min(records.size(), start + chunk_size);
    Chunk c;
    c.chunk_index = chunks.size();
    c.records.assign(records.begin() + static_cast<std::ptrdiff_t>(start),
                     records.begin() + static_cast<std::ptrdiff_t>(end));
    chunks.push_back(std::move(c));
  }
  return chunks;
}

}  // namespace logbatch
