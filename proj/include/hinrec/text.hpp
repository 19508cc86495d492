#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hinrec::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// 64-bit FNV-1a; stable across platforms, used for config and fold hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

}  // namespace hinrec::text
