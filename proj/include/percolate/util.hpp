#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace percolate {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form of `value` (locale independent).
std::string format_double(double value);

// RFC 4180 CSV. Fields containing a comma, quote or line break are quoted.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads one CSV record (which may span lines inside quotes). Returns nullopt at EOF.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see half a file.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Runs fn(0..count-1) on up to `jobs` threads. Each index is visited exactly once;
/// if any call throws, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace percolate
