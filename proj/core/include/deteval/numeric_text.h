// Locale-independent number <-> text helpers.
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace deteval {

// Parses the whole of `text` as a finite double; nullopt otherwise.
std::optional<double> parse_double(std::string_view text);
// Parses the whole of `text` as a base-10 int; nullopt otherwise.
std::optional<int> parse_int(std::string_view text);

// Shortest text that round-trips to the same double.
std::string format_shortest(double value);
// At most `digits` significant digits.
std::string format_significant(double value, int digits);
// `value` rounded to `digits` significant digits.
double round_significant(double value, int digits);

}  // namespace deteval
