#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace logbatch::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::size_t count_ws_tokens(std::string_view s);
std::string collapse_ws(std::string_view s);
bool is_space(char c);

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns the number of
/// replaced sequences through `replaced`.
std::string sanitize_utf8(std::string_view s, std::size_t& replaced);

/// Escapes backslash, tab, CR and LF (and `extra`, if non-zero) with a
/// backslash so a field can live in a tab-separated line.
std::string escape_field(std::string_view s, char extra = '\0');
std::string unescape_field(std::string_view s);

/// Splits on `sep`, honouring backslash escapes; the pieces stay escaped.
std::vector<std::string> split_escaped(std::string_view s, char sep);

}  // namespace logbatch::text
