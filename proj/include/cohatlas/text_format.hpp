// text_format.hpp - Number formatting and line tokenizing shared by the text formats

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cohatlas::text {

// 17 significant digits; strtod of the result reproduces the value bit for bit.
std::string format_double(double value);
// Whole-token parse; throws ValidationError on trailing garbage or non-finite values.
double parse_double(std::string_view token);
int parse_int(std::string_view token);

std::string_view trim(std::string_view s);
// Splits on blanks, dropping empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);
// Lines with '#' comments removed and surrounding blanks trimmed; empty lines dropped.
// Each entry keeps its 1-based line number for diagnostics.
std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text);

} // namespace cohatlas::text
