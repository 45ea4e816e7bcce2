#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace h2atlas {

/// Shortest text that parses back to the same double ("3", "0.1", "-9999").
std::string format_number(double v);

/// Fixed-point text with `digits` decimals; used for report tables.
std::string format_fixed(double v, int digits);

/// Comma-separated table with a header row. Fields are not quoted; the
/// toolkit never writes commas inside a field.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws ValidationError if absent.
    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::string_view col) const;
    const std::string& text(std::size_t row, std::string_view col) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source_name = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Parses a full token as a double; throws ParseError mentioning `what`.
double parse_number(std::string_view token, const std::string& source, std::size_t line,
                    std::string_view what);

} // namespace h2atlas
