#pragma once

#include <charconv>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace edmeta::csv {

std::vector<std::string> split_line(std::string_view line);

// Shortest representation that parses back to the same double.
std::string format(double v);

// Strict full-token parse; returns false on trailing garbage.
bool parse(std::string_view token, double& out);
bool parse(std::string_view token, long& out);

}  // namespace edmeta::csv
