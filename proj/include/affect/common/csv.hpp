#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

/// Shortest round-trip decimal form ("%.17g"); output is stable across runs.
std::string format_real(double value);

/// Strict real parse; throws DataError naming `what` on failure.
double parse_real(std::string_view text, std::string_view what);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based line numbers of each row in the source file (for error messages).
    std::vector<std::size_t> line_numbers;

    /// Column index by name; throws DataError when missing.
    std::size_t column(std::string_view name) const;
};

/// Reads a headed CSV file. Blank lines are skipped; rows must match the header width.
/// An empty file yields an empty header.
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace affect
