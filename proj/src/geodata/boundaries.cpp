#include <algorithm>
#include <cmath>

#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/geodata.hpp"
#include "json.hpp"

namespace h2atlas::geodata {

namespace {

using nlohmann::json;

double cross(LonLat o, LonLat a, LonLat b) noexcept
{
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(LonLat p, LonLat q, LonLat r) noexcept
{
    return std::min(p.lon, r.lon) <= q.lon && q.lon <= std::max(p.lon, r.lon)
        && std::min(p.lat, r.lat) <= q.lat && q.lat <= std::max(p.lat, r.lat);
}

int orientation(LonLat p, LonLat q, LonLat r) noexcept
{
    const double v = cross(p, q, r);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool segments_intersect(LonLat p1, LonLat q1, LonLat p2, LonLat q2) noexcept
{
    const int o1 = orientation(p1, q1, p2), o2 = orientation(p1, q1, q2);
    const int o3 = orientation(p2, q2, p1), o4 = orientation(p2, q2, q1);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, q2, q1)) return true;
    if (o3 == 0 && on_segment(p2, p1, q2)) return true;
    if (o4 == 0 && on_segment(p2, q1, q2)) return true;
    return false;
}

Ring clean_ring(const json& coords, const std::string& gid)
{
    if (!coords.is_array())
        throw GeometryError(gid, "ring is not an array of positions");
    Ring ring;
    for (const auto& pos : coords) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
            throw GeometryError(gid, "ring position is not [lon, lat]");
        LonLat p{pos[0].get<double>(), pos[1].get<double>()};
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
            throw GeometryError(gid, "ring position is not finite");
        if (ring.empty() || !(ring.back() == p))
            ring.push_back(p);
    }
    if (!ring.empty() && !(ring.front() == ring.back()))
        ring.push_back(ring.front());
    if (ring.size() < 4)
        throw GeometryError(gid, "ring needs at least three distinct vertices");

    const std::size_t n = ring.size() - 1; // edges
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent)
                continue;
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]))
                throw GeometryError(gid, "ring self-intersects (edges " + std::to_string(i) + " and "
                                             + std::to_string(j) + ")");
        }
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        area2 += cross(LonLat{}, ring[i], ring[i + 1]);
    if (area2 == 0.0)
        throw GeometryError(gid, "ring has zero area");
    return ring;
}

Polygon parse_polygon(const json& rings, const std::string& gid)
{
    if (!rings.is_array() || rings.empty())
        throw GeometryError(gid, "polygon has no rings");
    Polygon poly;
    for (const auto& r : rings)
        poly.push_back(clean_ring(r, gid));
    return poly;
}

double ring_area_km2(const Ring& ring) noexcept
{
    double lat_sum = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        lat_sum += ring[i].lat;
    const double lat0 = lat_sum / static_cast<double>(ring.size() - 1);
    const double kx = CellAreaModel::meters_per_degree_lon_at(lat0);
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        a += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
    return std::fabs(0.5 * a) * kx * kMetersPerDegreeLat * 1e-6;
}

} // namespace

std::vector<RegionBoundary> parse_boundaries(std::string_view geojson_text)
{
    json doc;
    try {
        doc = json::parse(geojson_text);
    } catch (const json::parse_error& e) {
        throw ParseError("geojson", 1, e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw StructuralError("boundaries must be a GeoJSON FeatureCollection");

    std::vector<RegionBoundary> out;
    std::size_t k = 0;
    for (const auto& f : doc["features"]) {
        const auto& props = f.value("properties", json::object());
        RegionBoundary b;
        b.gid = props.contains("gid") && props["gid"].is_string() ? props["gid"].get<std::string>()
                                                                   : "feature#" + std::to_string(k);
        if (!props.contains("gid") || !props.contains("country"))
            throw GeometryError(b.gid, "feature lacks 'gid' or 'country' property");
        b.country = props["country"].get<std::string>();
        const auto& geom = f.value("geometry", json::object());
        const std::string type = geom.value("type", "");
        if (type == "Polygon") {
            b.polygons.push_back(parse_polygon(geom["coordinates"], b.gid));
        } else if (type == "MultiPolygon") {
            for (const auto& p : geom["coordinates"])
                b.polygons.push_back(parse_polygon(p, b.gid));
        } else {
            throw GeometryError(b.gid, "unsupported geometry type '" + type + "'");
        }
        out.push_back(std::move(b));
        ++k;
    }
    return out;
}

std::vector<RegionBoundary> load_boundaries(const std::filesystem::path& path)
{
    return parse_boundaries(read_text(path));
}

bool point_in_polygon(const Polygon& poly, LonLat p) noexcept
{
    bool inside = false;
    for (const Ring& ring : poly) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            const LonLat a = ring[i], b = ring[j];
            if ((a.lat > p.lat) != (b.lat > p.lat)) {
                const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
                if (p.lon < x)
                    inside = !inside;
            }
        }
    }
    return inside;
}

double polygon_area_km2(const Polygon& poly) noexcept
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        a += (i == 0 ? 1.0 : -1.0) * ring_area_km2(poly[i]);
    return std::max(a, 0.0);
}

std::string RasterizedRegions::region_of(std::size_t cell) const
{
    const auto k = cell_region.at(cell);
    return k < 0 ? std::string{} : regions[static_cast<std::size_t>(k)].id;
}

RasterizedRegions rasterize_regions(const std::vector<RegionBoundary>& boundaries,
                                    const GridGeometry& grid)
{
    grid.validate();
    RasterizedRegions out;
    out.cell_region.assign(grid.size(), -1);
    std::vector<std::vector<std::size_t>> cells(boundaries.size());

    for (std::size_t r = 0; r < grid.n_rows; ++r) {
        const double lat = grid.center_lat(r);
        for (std::size_t c = 0; c < grid.n_cols; ++c) {
            const LonLat p{grid.center_lon(c), lat};
            for (std::size_t b = 0; b < boundaries.size(); ++b) {
                const auto& polys = boundaries[b].polygons;
                const bool hit = std::any_of(polys.begin(), polys.end(),
                                             [&](const Polygon& poly) { return point_in_polygon(poly, p); });
                if (hit) {
                    const std::size_t idx = grid.index(r, c);
                    out.cell_region[idx] = static_cast<std::int32_t>(b);
                    cells[b].push_back(idx);
                    break;
                }
            }
        }
    }

    for (std::size_t b = 0; b < boundaries.size(); ++b) {
        const auto& bd = boundaries[b];
        if (cells[b].empty()) {
            Region r;
            r.id = bd.gid;
            r.country_code = bd.country;
            r.grid = grid;
            for (const auto& poly : bd.polygons)
                r.area_km2 += polygon_area_km2(poly);
            out.warnings.push_back("region '" + bd.gid + "' covers no cell center; area taken from polygon");
            out.regions.push_back(std::move(r));
        } else {
            out.regions.push_back(make_region(bd.gid, bd.country, grid, std::move(cells[b])));
        }
    }
    return out;
}

} // namespace h2atlas::geodata
