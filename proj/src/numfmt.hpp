#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chambersim {

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);
void append_number(std::string& out, double v);

/// Strict parse of the whole token; leading/trailing spaces are trimmed.
/// Rejects empty input, trailing garbage, inf and nan.
std::optional<double> parse_number(std::string_view s);
std::optional<std::int64_t> parse_integer(std::string_view s);
std::optional<std::uint64_t> parse_unsigned(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace chambersim
