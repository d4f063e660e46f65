#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readmit::csv {

/// Splits one CSV record. Handles double-quoted fields with embedded commas
/// and doubled quotes. Quotes are removed from the returned values.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape_field(std::string_view field);

std::string join_record(std::span<const std::string> fields);

/// Reads the next physical line, stripping a trailing '\r'. Returns nullopt at EOF.
std::optional<std::string> read_line(std::istream& in);

/// 64-bit FNV-1a, used for schema fingerprints and config hashes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace readmit::csv
