#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "logbatch/ingest.hpp"

namespace logbatch {

/// Replaces variable-like tokens in clustering input. Distinct from the
/// template wildcard `<*>`.
inline constexpr std::string_view kMaskSymbol = "<M>";

/// Refined delimiters applied inside whitespace tokens. Each is emitted as
/// its own token.
inline constexpr std::string_view kRefinedDelimiters = "=,:;()[]";

struct TokenizedLog {
  const LogRecord* record = nullptr;
  std::vector<std::string> tokens;
  std::vector<std::string> masked_tokens;
};

bool is_url_like(std::string_view token);
bool is_path_like(std::string_view token);

/// Whitespace split, then split on refined delimiters (plus `extra_delims`)
/// except inside URL-like and path-like tokens.
std::vector<std::string> tokenize(std::string_view content, std::string_view extra_delims = {});

/// Pieces of a single whitespace token after refined splitting.
std::vector<std::string> split_refined(std::string_view ws_token, std::string_view extra_delims = {});

bool is_decimal_number(std::string_view token);
bool is_hex_number(std::string_view token);
bool is_ipv4(std::string_view token);
bool is_url(std::string_view token);
bool is_maskable(std::string_view token);

struct MaskRule {
  std::string_view name;
  // Equivalent anchored regular expression, for auditing.
  std::string_view pattern;
  bool (*matches)(std::string_view);
};

const std::vector<MaskRule>& mask_rules();
std::string dump_mask_rules();

std::vector<std::string> mask(const std::vector<std::string>& tokens);

TokenizedLog preprocess(const LogRecord& record, std::string_view extra_delims = {});

/// Rewrites `content` keeping its whitespace layout, replacing each refined
/// piece for which `pred` holds with `replacement`.
std::string replace_pieces(std::string_view content, std::string_view replacement,
                           bool (*pred)(std::string_view), std::string_view extra_delims = {});

}  // namespace logbatch
