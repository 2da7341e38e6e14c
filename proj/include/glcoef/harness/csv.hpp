#pragma once

// Streaming CSV output: header first, one row at a time, so large tables
// never sit in memory. Quoting follows RFC 4180; doubles are written with 17
// significant digits so they parse back to the same value.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace glcoef::harness {

using CsvField = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

std::string format_double(double v);
std::string quote_field(std::string_view s);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(const std::vector<CsvField>& fields);
    std::size_t rows_written() const noexcept { return rows_; }
    const std::vector<std::string>& header() const noexcept { return header_; }
    /// Flushes and throws Error if any write failed.
    void close();

private:
    void write_line(const std::vector<std::string>& cells);

    std::filesystem::path path_;
    std::ofstream out_;
    std::vector<std::string> header_;
    std::size_t rows_ = 0;
};

/// Parses a CSV file written by CsvWriter (header + rows of raw cells).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

} // namespace glcoef::harness
