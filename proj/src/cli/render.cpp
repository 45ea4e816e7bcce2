#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "internal.hpp"

namespace h2atlas::pipeline::detail {

namespace {

struct Rgb {
    double r, g, b;
};

// viridis anchors
constexpr std::array<Rgb, 5> kRamp{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

constexpr std::array<const char*, 8> kSeriesColors{"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                   "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string hex(const Rgb& c)
{
    static const char* digits = "0123456789abcdef";
    std::string s = "#";
    for (double v : {c.r, c.g, c.b}) {
        const int x = std::clamp(static_cast<int>(std::lround(v)), 0, 255);
        s += digits[x / 16];
        s += digits[x % 16];
    }
    return s;
}

std::string ramp_color(int k, int classes)
{
    const double t = classes > 1 ? static_cast<double>(k) / (classes - 1) : 0.5;
    const double pos = t * (kRamp.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), kRamp.size() - 2);
    const double f = pos - static_cast<double>(i);
    const Rgb& a = kRamp[i];
    const Rgb& b = kRamp[i + 1];
    return hex({a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)});
}

std::string esc(const std::string& s)
{
    std::string o;
    for (char ch : s) {
        switch (ch) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        default: o += ch;
        }
    }
    return o;
}

std::string label(double v)
{
    const double a = std::fabs(v);
    return format_fixed(v, a >= 100 ? 0 : a >= 10 ? 1 : a >= 1 ? 2 : 3);
}

} // namespace

std::string render_choropleth(const geodata::GridGeometry& grid, const std::vector<double>& values,
                              const std::string& title, const std::string& unit, int classes)
{
    double lo = INFINITY, hi = -INFINITY;
    for (double v : values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const bool any = std::isfinite(lo);
    if (!any || hi == lo)
        classes = 1;
    const int px = std::max(2, static_cast<int>(640 / grid.n_cols));
    const int map_w = px * static_cast<int>(grid.n_cols), map_h = px * static_cast<int>(grid.n_rows);
    const int legend_w = 200, top = 40;
    const int width = map_w + legend_w + 30, height = std::max(map_h, 30 + 22 * classes) + top + 20;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"10\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << esc(title) << "</text>\n";
    s << "<g transform=\"translate(10," << top << ")\" shape-rendering=\"crispEdges\">\n";
    s << "<rect width=\"" << map_w << "\" height=\"" << map_h << "\" fill=\"#f2f2f2\"/>\n";
    auto cls = [&](double v) {
        if (classes == 1)
            return 0;
        return std::clamp(static_cast<int>((v - lo) / (hi - lo) * classes), 0, classes - 1);
    };
    for (std::size_t r = 0; r < grid.n_rows; ++r)
        for (std::size_t c = 0; c < grid.n_cols; ++c) {
            const double v = values[grid.index(r, c)];
            if (!std::isfinite(v))
                continue;
            s << "<rect x=\"" << c * px << "\" y=\"" << r * px << "\" width=\"" << px << "\" height=\"" << px
              << "\" fill=\"" << ramp_color(cls(v), classes) << "\"/>\n";
        }
    s << "</g>\n";
    const int lx = map_w + 25;
    s << "<text x=\"" << lx << "\" y=\"" << top + 12 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << esc(unit) << "</text>\n";
    for (int k = 0; k < classes && any; ++k) {
        const double a = lo + (hi - lo) * k / classes, b = lo + (hi - lo) * (k + 1) / classes;
        const int y = top + 22 + 22 * k;
        s << "<rect x=\"" << lx << "\" y=\"" << y << "\" width=\"16\" height=\"16\" fill=\""
          << ramp_color(k, classes) << "\"/>\n";
        s << "<text x=\"" << lx + 22 << "\" y=\"" << y + 13 << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << (classes == 1 ? label(lo) : label(a) + " to " + label(b)) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string render_curves(const std::vector<CurveSeries>& series, const std::string& title)
{
    double max_x = 0.0, max_y = 0.0;
    for (const auto& cs : series)
        for (const auto& [x, y] : cs.steps) {
            if (std::isfinite(x))
                max_x = std::max(max_x, x);
            if (std::isfinite(y))
                max_y = std::max(max_y, y);
        }
    max_x = max_x > 0.0 ? max_x : 1.0;
    max_y = max_y > 0.0 ? max_y * 1.1 : 1.0;
    const int w = 640, h = 400, left = 60, top = 40, right = 160, bottom = 50;
    const int width = left + w + right, height = top + h + bottom;
    auto X = [&](double x) { return left + x / max_x * w; };
    auto Y = [&](double y) { return top + h - y / max_y * h; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"10\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << esc(title) << "</text>\n";
    s << "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"none\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = max_x * k / 5, yv = max_y * k / 5;
        s << "<line x1=\"" << format_fixed(X(xv), 1) << "\" y1=\"" << top + h << "\" x2=\"" << format_fixed(X(xv), 1)
          << "\" y2=\"" << top << "\" stroke=\"#e0e0e0\"/>\n";
        s << "<text x=\"" << format_fixed(X(xv), 1) << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">"
          << label(xv) << "</text>\n";
        s << "<line x1=\"" << left << "\" y1=\"" << format_fixed(Y(yv), 1) << "\" x2=\"" << left + w << "\" y2=\""
          << format_fixed(Y(yv), 1) << "\" stroke=\"#e0e0e0\"/>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << format_fixed(Y(yv) + 4, 1) << "\" text-anchor=\"end\">"
          << label(yv) << "</text>\n";
    }
    s << "<text x=\"" << left + w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">cumulative hydrogen potential [TWh/a]</text>\n";
    s << "<text transform=\"translate(16," << top + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">LCOH [EUR/kg]</text>\n";
    s << "</g>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kSeriesColors[i % kSeriesColors.size()];
        std::string pts;
        double prev = 0.0;
        for (const auto& [x, y] : series[i].steps) {
            if (!std::isfinite(y))
                continue;
            pts += format_fixed(X(prev), 2) + "," + format_fixed(Y(y), 2) + " " + format_fixed(X(x), 2) + ","
                + format_fixed(Y(y), 2) + " ";
            prev = x;
        }
        if (!pts.empty())
            pts.pop_back();
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
        const int ly = top + 10 + 18 * static_cast<int>(i);
        s << "<rect x=\"" << left + w + 15 << "\" y=\"" << ly << "\" width=\"14\" height=\"4\" fill=\"" << color
          << "\"/>\n";
        s << "<text x=\"" << left + w + 35 << "\" y=\"" << ly + 6 << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << esc(series[i].label) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void render_stage(const RunConfig& c, Stage s)
{
    const fs::path dir = stage_path(c, s);
    switch (s) {
    case Stage::optimization: {
        const RegionSet rs = load_region_set(c);
        const CsvTable t = read_csv(dir / "summary.csv");
        std::map<std::string, double> lcoh, per_area, gw;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.text(r, "status") != "ok")
                continue;
            const auto& gid = t.text(r, "gid");
            lcoh[gid] = t.number(r, "map_lcoh_eur_per_kg");
            per_area[gid] = t.number(r, "h2_t_per_km2");
            gw[gid] = 100.0 * t.number(r, "groundwater_feasible_share");
        }
        write_text(dir / "lcoh_map.svg",
                   render_choropleth(rs.grid, region_values_to_cells(rs, lcoh),
                                     "LCOH at " + label(100.0 * c.map_step) + "% expansion", "EUR/kg",
                                     c.map_classes));
        write_text(dir / "h2_per_area_map.svg",
                   render_choropleth(rs.grid, region_values_to_cells(rs, per_area), "Hydrogen potential per area",
                                     "t/(km2 a)", c.map_classes));
        write_text(dir / "groundwater_share_map.svg",
                   render_choropleth(rs.grid, region_values_to_cells(rs, gw),
                                     "Expansion served by sustainable groundwater", "% of potential",
                                     c.map_classes));
        break;
    }
    case Stage::setaside: {
        const CsvTable t = read_csv(dir / "national_curves.csv");
        std::vector<CurveSeries> series;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (series.empty() || series.back().label != t.text(r, "country"))
                series.push_back({t.text(r, "country"), {}});
            series.back().steps.emplace_back(t.number(r, "cumulative_twh"), t.number(r, "lcoh_eur_per_kg"));
        }
        write_text(dir / "cost_potential_curves.svg", render_curves(series, "National cost-potential curves"));
        break;
    }
    case Stage::socio: {
        const geodata::RasterGrid g = geodata::load_raster(dir / "composite.asc");
        std::vector<double> v(g.size(), NAN);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!g.is_nodata(i))
                v[i] = g[i];
        write_text(dir / "composite_map.svg",
                   render_choropleth(g.geometry(), v, "Composite socio-economic indicator", "score 0-100",
                                     c.map_classes));
        break;
    }
    default: break;
    }
}

} // namespace h2atlas::pipeline::detail
