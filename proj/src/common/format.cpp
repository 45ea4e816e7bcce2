#include "h2atlas/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include "h2atlas/errors.hpp"

namespace h2atlas {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        v = 0.0; // drop the sign of -0
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

std::string format_fixed(double v, int digits)
{
    if (!std::isfinite(v))
        return format_number(v);
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    std::string s(buf.data(), p);
    if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

double parse_number(std::string_view token, const std::string& source, std::size_t line,
                    std::string_view what)
{
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
        token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
        token.remove_suffix(1);
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    double v = 0.0;
    const auto* end = token.data() + token.size();
    auto [p, ec] = std::from_chars(token.data(), end, v);
    if (token.empty() || ec != std::errc{} || p != end)
        throw ParseError(source, line, "bad number '" + std::string(token) + "' for " + std::string(what));
    return v;
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw ValidationError("CSV has no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view col) const
{
    return parse_number(rows.at(row).at(column(col)), "csv", row + 2, col);
}

const std::string& CsvTable::text(std::size_t row, std::string_view col) const
{
    return rows.at(row).at(column(col));
}

CsvTable parse_csv(std::string_view text, const std::string& source_name)
{
    CsvTable t;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> fields;
        std::size_t s = 0;
        while (true) {
            const std::size_t c = line.find(',', s);
            std::string_view f = line.substr(s, c == std::string_view::npos ? line.size() - s : c - s);
            while (!f.empty() && f.front() == ' ')
                f.remove_prefix(1);
            while (!f.empty() && f.back() == ' ')
                f.remove_suffix(1);
            fields.emplace_back(f);
            if (c == std::string_view::npos)
                break;
            s = c + 1;
        }
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            if (fields.size() != t.header.size())
                throw ParseError(source_name, line_no,
                                 "expected " + std::to_string(t.header.size()) + " fields, found "
                                     + std::to_string(fields.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (t.header.empty())
        throw ParseError(source_name, line_no, "CSV has no header row");
    return t;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

CsvTable read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_text(path), path.string());
}

std::string format_csv(const CsvTable& table)
{
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += row[i];
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows)
        emit(r);
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace h2atlas
