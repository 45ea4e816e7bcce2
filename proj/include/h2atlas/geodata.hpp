#pragma once

// Raster and region primitives shared by every other module.
//
// Grids are plain geographic lon/lat. Row 0 is the northernmost row (ESRI
// ASCII order); the origin is the lower-left corner of the grid. Distances
// and areas use a two-constant local-meter metric:
//   1 deg latitude  = 110 540 m
//   1 deg longitude = 111 320 m * cos(latitude)

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace h2atlas::geodata {

inline constexpr double kMetersPerDegreeLat = 110540.0;
inline constexpr double kMetersPerDegreeLonAtEquator = 111320.0;

struct GridGeometry {
    std::size_t n_cols = 0;
    std::size_t n_rows = 0;
    double origin_lon = 0.0; ///< lower-left corner
    double origin_lat = 0.0;
    double cell_size = 0.0; ///< degrees

    std::size_t size() const noexcept { return n_cols * n_rows; }
    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * n_cols + col; }
    std::size_t row_of(std::size_t idx) const noexcept { return idx / n_cols; }
    std::size_t col_of(std::size_t idx) const noexcept { return idx % n_cols; }

    double center_lon(std::size_t col) const noexcept
    {
        return origin_lon + (static_cast<double>(col) + 0.5) * cell_size;
    }
    double center_lat(std::size_t row) const noexcept
    {
        return origin_lat + (static_cast<double>(n_rows - row) - 0.5) * cell_size;
    }

    /// Throws ValidationError unless n_cols, n_rows >= 1 and cell_size > 0 (finite).
    void validate() const;

    bool operator==(const GridGeometry&) const = default;
};

/// Metric used for every area and distance computation.
struct CellAreaModel {
    static double meters_per_degree_lat() noexcept { return kMetersPerDegreeLat; }
    static double meters_per_degree_lon_at(double lat_deg) noexcept
    {
        return kMetersPerDegreeLonAtEquator * std::cos(lat_deg * std::numbers::pi / 180.0);
    }
    static double cell_area_m2(double center_lat_deg, double cell_size_deg) noexcept
    {
        return (meters_per_degree_lon_at(center_lat_deg) * cell_size_deg)
            * (kMetersPerDegreeLat * cell_size_deg);
    }
    static double cell_area_km2(double center_lat_deg, double cell_size_deg) noexcept
    {
        return cell_area_m2(center_lat_deg, cell_size_deg) * 1e-6;
    }
};

/// Area of cell `idx` on `g` in km².
double cell_area_km2(const GridGeometry& g, std::size_t idx) noexcept;

/// East-west length in meters of one column step between rows r1 and r2,
/// evaluated at the mean latitude of the two row centers.
inline double column_step_m(const GridGeometry& g, std::size_t r1, std::size_t r2) noexcept
{
    const double mid_lat = 0.5 * (g.center_lat(r1) + g.center_lat(r2));
    return CellAreaModel::meters_per_degree_lon_at(mid_lat) * g.cell_size;
}

inline double row_step_m(const GridGeometry& g) noexcept { return kMetersPerDegreeLat * g.cell_size; }

/// Center-to-center distance between two cells. This is the reference
/// definition of the metric; distance_to_feature reproduces it exactly.
inline double cell_center_distance_m(const GridGeometry& g, std::size_t r1, std::size_t c1,
                                     std::size_t r2, std::size_t c2) noexcept
{
    const double dc = static_cast<double>(c1 > c2 ? c1 - c2 : c2 - c1);
    const double dr = static_cast<double>(r1 > r2 ? r1 - r2 : r2 - r1);
    const double dx = dc * column_step_m(g, r1, r2);
    const double dy = dr * row_step_m(g);
    return std::sqrt(dx * dx + dy * dy);
}

class RasterGrid {
public:
    static constexpr double kDefaultNodata = -9999.0;

    RasterGrid() = default;
    RasterGrid(GridGeometry geometry, double nodata = kDefaultNodata, double fill = 0.0);
    RasterGrid(GridGeometry geometry, double nodata, std::vector<double> cells);

    const GridGeometry& geometry() const noexcept { return geometry_; }
    double nodata() const noexcept { return nodata_; }

    std::size_t size() const noexcept { return cells_.size(); }
    double operator[](std::size_t idx) const noexcept { return cells_[idx]; }
    double& operator[](std::size_t idx) noexcept { return cells_[idx]; }
    double at(std::size_t row, std::size_t col) const { return cells_.at(geometry_.index(row, col)); }
    double& at(std::size_t row, std::size_t col) { return cells_.at(geometry_.index(row, col)); }

    bool is_nodata(std::size_t idx) const noexcept { return is_nodata_value(cells_[idx]); }
    bool is_nodata_value(double v) const noexcept
    {
        return v == nodata_ || (std::isnan(nodata_) && std::isnan(v));
    }

    std::span<const double> cells() const noexcept { return cells_; }
    std::span<double> cells() noexcept { return cells_; }

    /// Sum of all non-nodata cells (compensated).
    double valid_sum() const noexcept;

    /// Throws if the geometry is invalid, the cell count is wrong, or a
    /// non-nodata cell is not finite.
    void validate() const;

private:
    GridGeometry geometry_;
    double nodata_ = kDefaultNodata;
    std::vector<double> cells_;
};

class MaskGrid {
public:
    MaskGrid() = default;
    explicit MaskGrid(GridGeometry geometry, bool fill = false);
    MaskGrid(GridGeometry geometry, std::vector<std::uint8_t> cells);

    const GridGeometry& geometry() const noexcept { return geometry_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool operator[](std::size_t idx) const noexcept { return cells_[idx] != 0; }
    bool at(std::size_t row, std::size_t col) const { return cells_.at(geometry_.index(row, col)) != 0; }
    void set(std::size_t idx, bool v) { cells_.at(idx) = v ? 1 : 0; }
    void set(std::size_t row, std::size_t col, bool v) { set(geometry_.index(row, col), v); }
    std::size_t count() const noexcept;

    std::span<const std::uint8_t> cells() const noexcept { return cells_; }

    bool operator==(const MaskGrid&) const = default;

private:
    GridGeometry geometry_;
    std::vector<std::uint8_t> cells_;
};

/// Mask from a raster: true where the cell is valid and non-zero.
MaskGrid mask_from_raster(const RasterGrid& raster);

/// Throws AlignmentError naming `what` if the two geometries differ.
void require_aligned(const GridGeometry& a, const GridGeometry& b, const std::string& what);

struct Region {
    std::string id;           ///< GID-2-style identifier
    std::string country_code; ///< ISO3
    GridGeometry grid;        ///< reference grid the mask indexes into
    std::vector<std::size_t> mask; ///< sorted cell indices
    double area_km2 = 0.0;

    /// Mask non-empty, area positive and equal to the cell-area sum within 0.5 %.
    void validate() const;
};

/// Geodesic area of a set of cells (compensated sum).
double mask_area_km2(const GridGeometry& g, std::span<const std::size_t> cells) noexcept;

Region make_region(std::string id, std::string country_code, const GridGeometry& grid,
                   std::vector<std::size_t> cells);

// ---------------------------------------------------------------------------
// File formats

enum class RasterFormat { esri_ascii, flat_binary };

/// Picks the format from the extension: ".asc" is ESRI ASCII, ".h2ar"/".bin" flat binary.
RasterFormat format_for_path(const std::filesystem::path& path);

RasterGrid load_raster(const std::filesystem::path& path, RasterFormat format);
inline RasterGrid load_raster(const std::filesystem::path& path)
{
    return load_raster(path, format_for_path(path));
}
void save_raster(const RasterGrid& grid, const std::filesystem::path& path, RasterFormat format);
inline void save_raster(const RasterGrid& grid, const std::filesystem::path& path)
{
    save_raster(grid, path, format_for_path(path));
}

RasterGrid parse_esri_ascii(std::string_view text, const std::string& source_name = "<memory>");
std::string format_esri_ascii(const RasterGrid& grid);

/// flat_binary: "H2AR", u32 n_cols, u32 n_rows, f64 origin_lon, f64 origin_lat,
/// f64 cell_size (all little-endian), then n_rows*n_cols f64 cells row-major.
/// Nodata cells are stored as NaN.
std::vector<std::uint8_t> encode_flat_binary(const RasterGrid& grid);
RasterGrid decode_flat_binary(std::span<const std::uint8_t> bytes,
                              double nodata = RasterGrid::kDefaultNodata);

inline constexpr std::size_t kFlatBinaryHeaderBytes = 36;

// ---------------------------------------------------------------------------
// Region boundaries

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
    bool operator==(const LonLat&) const = default;
};

using Ring = std::vector<LonLat>;
/// First ring is the outer boundary, the rest are holes.
using Polygon = std::vector<Ring>;

struct RegionBoundary {
    std::string gid;
    std::string country;
    std::vector<Polygon> polygons;
};

/// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features with
/// "gid" and "country" properties. Rings are cleaned (consecutive duplicates
/// dropped, closed if open) and validated; invalid rings raise GeometryError.
std::vector<RegionBoundary> parse_boundaries(std::string_view geojson_text);
std::vector<RegionBoundary> load_boundaries(const std::filesystem::path& path);

bool point_in_polygon(const Polygon& poly, LonLat p) noexcept;

/// Polygon area in km² using the local-meter metric at each ring's mean latitude.
double polygon_area_km2(const Polygon& poly) noexcept;

struct RasterizedRegions {
    /// Per cell: index into `regions`, or -1 for unassigned cells.
    std::vector<std::int32_t> cell_region;
    std::vector<Region> regions; ///< same order as the input boundaries
    std::vector<std::string> warnings;

    /// Region id owning a cell, empty if unassigned.
    std::string region_of(std::size_t cell) const;
};

/// Assigns each cell to the first boundary (input order) containing its center.
/// A boundary covering no cell center is kept with its polygon area and an
/// empty mask, and a warning is recorded.
RasterizedRegions rasterize_regions(const std::vector<RegionBoundary>& boundaries,
                                    const GridGeometry& grid);

// ---------------------------------------------------------------------------
// Distance transform

/// Exact minimum center-to-center distance (cell_center_distance_m) from each
/// cell to the nearest true cell of `feature`. True cells hold 0. The result's
/// nodata sentinel is +infinity, which is also what every cell holds when the
/// mask has no true cell.
RasterGrid distance_to_feature(const MaskGrid& feature);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

} // namespace h2atlas::geodata
