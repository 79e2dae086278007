#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace plankforge::detail {

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
std::size_t parse_size(std::string_view text, std::string_view field);
double parse_double(std::string_view text, std::string_view field);
/// Shortest-safe round-trip formatting: 17 significant digits.
std::string format_double(double x);

}  // namespace plankforge::detail
