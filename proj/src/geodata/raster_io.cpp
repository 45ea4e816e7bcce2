#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/geodata.hpp"

namespace h2atlas::geodata {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_double(std::string_view tok, double& out)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc{} && p == end;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v)
{
    static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
    std::array<std::uint8_t, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    out.insert(out.end(), b.begin(), b.end());
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset)
{
    T v;
    std::memcpy(&v, in.data() + offset, sizeof(T));
    return v;
}

} // namespace

RasterFormat format_for_path(const std::filesystem::path& path)
{
    const auto ext = lower(path.extension().string());
    if (ext == ".asc")
        return RasterFormat::esri_ascii;
    if (ext == ".h2ar" || ext == ".bin")
        return RasterFormat::flat_binary;
    throw ValidationError("unknown raster extension '" + ext + "' for " + path.string());
}

RasterGrid parse_esri_ascii(std::string_view text, const std::string& source_name)
{
    GridGeometry g;
    double nodata = RasterGrid::kDefaultNodata;
    bool have[5] = {false, false, false, false, false};
    bool x_center = false, y_center = false;

    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::vector<double> cells;

    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size())
            return false;
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    bool in_body = false;
    while (next_line(line)) {
        const auto toks = split_ws(line);
        if (toks.empty())
            continue;
        if (!in_body && std::isalpha(static_cast<unsigned char>(toks[0].front()))) {
            if (toks.size() != 2)
                throw ParseError(source_name, line_no, "header line must be '<key> <value>'");
            const std::string key = lower(toks[0]);
            double v = 0.0;
            if (!parse_double(toks[1], v))
                throw ParseError(source_name, line_no, "bad numeric value for '" + key + "'");
            auto as_count = [&](std::size_t& dst) {
                if (v < 1.0 || v != std::floor(v))
                    throw ParseError(source_name, line_no, "'" + key + "' must be a positive integer");
                dst = static_cast<std::size_t>(v);
            };
            if (key == "ncols") {
                as_count(g.n_cols);
                have[0] = true;
            } else if (key == "nrows") {
                as_count(g.n_rows);
                have[1] = true;
            } else if (key == "xllcorner" || key == "xllcenter") {
                g.origin_lon = v;
                x_center = key == "xllcenter";
                have[2] = true;
            } else if (key == "yllcorner" || key == "yllcenter") {
                g.origin_lat = v;
                y_center = key == "yllcenter";
                have[3] = true;
            } else if (key == "cellsize") {
                if (!(v > 0.0))
                    throw ParseError(source_name, line_no, "cellsize must be positive");
                g.cell_size = v;
                have[4] = true;
            } else if (key == "nodata_value") {
                nodata = v;
            } else {
                throw ParseError(source_name, line_no, "unknown header key '" + std::string(toks[0]) + "'");
            }
            continue;
        }
        if (!in_body) {
            static const char* names[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"};
            for (int k = 0; k < 5; ++k)
                if (!have[k])
                    throw ParseError(source_name, line_no, std::string("header is missing '") + names[k] + "'");
            in_body = true;
            cells.reserve(g.size());
        }
        for (auto tok : toks) {
            double v = 0.0;
            if (!parse_double(tok, v))
                throw ParseError(source_name, line_no, "bad cell value '" + std::string(tok) + "'");
            cells.push_back(v);
        }
    }
    if (!in_body) {
        if (!have[0] || !have[1] || !have[4])
            throw ParseError(source_name, line_no, "incomplete header");
    }
    if (x_center)
        g.origin_lon -= 0.5 * g.cell_size;
    if (y_center)
        g.origin_lat -= 0.5 * g.cell_size;
    if (cells.size() != g.size()) {
        std::ostringstream msg;
        msg << source_name << ": header declares " << g.size() << " cells, body holds " << cells.size();
        throw StructuralError(msg.str());
    }
    return RasterGrid(g, nodata, std::move(cells));
}

std::string format_esri_ascii(const RasterGrid& grid)
{
    const auto& g = grid.geometry();
    std::string out;
    out.reserve(64 + g.size() * 8);
    out += "ncols " + std::to_string(g.n_cols) + "\n";
    out += "nrows " + std::to_string(g.n_rows) + "\n";
    out += "xllcorner " + format_number(g.origin_lon) + "\n";
    out += "yllcorner " + format_number(g.origin_lat) + "\n";
    out += "cellsize " + format_number(g.cell_size) + "\n";
    out += "NODATA_value " + format_number(grid.nodata()) + "\n";
    for (std::size_t r = 0; r < g.n_rows; ++r) {
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            if (c)
                out += ' ';
            out += format_number(grid[g.index(r, c)]);
        }
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> encode_flat_binary(const RasterGrid& grid)
{
    const auto& g = grid.geometry();
    std::vector<std::uint8_t> out;
    out.reserve(kFlatBinaryHeaderBytes + 8 * g.size());
    out.insert(out.end(), {'H', '2', 'A', 'R'});
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_cols));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_rows));
    put_le<double>(out, g.origin_lon);
    put_le<double>(out, g.origin_lat);
    put_le<double>(out, g.cell_size);
    for (std::size_t i = 0; i < grid.size(); ++i)
        put_le<double>(out, grid.is_nodata(i) ? std::numeric_limits<double>::quiet_NaN() : grid[i]);
    return out;
}

RasterGrid decode_flat_binary(std::span<const std::uint8_t> bytes, double nodata)
{
    if (bytes.size() < kFlatBinaryHeaderBytes || std::memcmp(bytes.data(), "H2AR", 4) != 0)
        throw StructuralError("flat_binary: missing 'H2AR' header");
    GridGeometry g;
    g.n_cols = get_le<std::uint32_t>(bytes, 4);
    g.n_rows = get_le<std::uint32_t>(bytes, 8);
    g.origin_lon = get_le<double>(bytes, 12);
    g.origin_lat = get_le<double>(bytes, 20);
    g.cell_size = get_le<double>(bytes, 28);
    g.validate();
    const std::size_t expected = kFlatBinaryHeaderBytes + 8 * g.size();
    if (bytes.size() != expected)
        throw StructuralError("flat_binary: expected " + std::to_string(expected) + " bytes, found "
                              + std::to_string(bytes.size()));
    std::vector<double> cells(g.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double v = get_le<double>(bytes, kFlatBinaryHeaderBytes + 8 * i);
        cells[i] = std::isnan(v) ? nodata : v;
    }
    return RasterGrid(g, nodata, std::move(cells));
}

RasterGrid load_raster(const std::filesystem::path& path, RasterFormat format)
{
    const std::string bytes = read_file(path);
    if (format == RasterFormat::esri_ascii)
        return parse_esri_ascii(bytes, path.string());
    return decode_flat_binary(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

void save_raster(const RasterGrid& grid, const std::filesystem::path& path, RasterFormat format)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    if (format == RasterFormat::esri_ascii) {
        const auto text = format_esri_ascii(grid);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    } else {
        const auto bytes = encode_flat_binary(grid);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace h2atlas::geodata
