#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atlas::csv {

/// Splits one line into fields. Double-quoted fields may contain commas and
/// doubled quotes (""). Returns nullopt for an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

/// Quotes a field if it needs quoting.
std::string escape(std::string_view field);

/// Reads the next non-blank line, stripping a trailing CR and a leading
/// UTF-8 byte order mark on the first line. Counts lines in `line_no`.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

std::string_view trim(std::string_view s) noexcept;
std::string fold(std::string_view s);

std::optional<double> parse_real(std::string_view text);
std::optional<int> parse_int(std::string_view text);

/// Shortest representation that parses back to the same double.
std::string format_real(double v);

}  // namespace atlas::csv
