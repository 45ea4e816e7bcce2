#include "h2atlas/geodata.hpp"

#include <algorithm>
#include <sstream>

#include "h2atlas/errors.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::geodata {

void GridGeometry::validate() const
{
    if (n_cols < 1 || n_rows < 1)
        throw ValidationError("grid must have at least one row and one column");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw ValidationError("cell_size must be positive and finite");
    if (!std::isfinite(origin_lon) || !std::isfinite(origin_lat))
        throw ValidationError("grid origin must be finite");
}

double cell_area_km2(const GridGeometry& g, std::size_t idx) noexcept
{
    return CellAreaModel::cell_area_km2(g.center_lat(g.row_of(idx)), g.cell_size);
}

RasterGrid::RasterGrid(GridGeometry geometry, double nodata, double fill)
    : geometry_(geometry), nodata_(nodata), cells_(geometry.size(), fill)
{
    geometry_.validate();
}

RasterGrid::RasterGrid(GridGeometry geometry, double nodata, std::vector<double> cells)
    : geometry_(geometry), nodata_(nodata), cells_(std::move(cells))
{
    validate();
}

double RasterGrid::valid_sum() const noexcept
{
    CompensatedSum s;
    for (double v : cells_)
        if (!is_nodata_value(v))
            s.add(v);
    return s.value();
}

void RasterGrid::validate() const
{
    geometry_.validate();
    if (cells_.size() != geometry_.size()) {
        std::ostringstream msg;
        msg << "raster holds " << cells_.size() << " cells, geometry needs " << geometry_.size();
        throw StructuralError(msg.str());
    }
    for (std::size_t i = 0; i < cells_.size(); ++i)
        if (!is_nodata_value(cells_[i]) && !std::isfinite(cells_[i]))
            throw ValidationError("non-finite value in cell " + std::to_string(i));
}

MaskGrid::MaskGrid(GridGeometry geometry, bool fill)
    : geometry_(geometry), cells_(geometry.size(), fill ? 1 : 0)
{
    geometry_.validate();
}

MaskGrid::MaskGrid(GridGeometry geometry, std::vector<std::uint8_t> cells)
    : geometry_(geometry), cells_(std::move(cells))
{
    geometry_.validate();
    if (cells_.size() != geometry_.size())
        throw StructuralError("mask cell count does not match its geometry");
    for (auto& c : cells_)
        c = c != 0 ? 1 : 0;
}

std::size_t MaskGrid::count() const noexcept
{
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

MaskGrid mask_from_raster(const RasterGrid& raster)
{
    MaskGrid m(raster.geometry());
    for (std::size_t i = 0; i < raster.size(); ++i)
        m.set(i, !raster.is_nodata(i) && raster[i] != 0.0);
    return m;
}

void require_aligned(const GridGeometry& a, const GridGeometry& b, const std::string& what)
{
    if (!(a == b))
        throw AlignmentError(what + ": grid geometry does not match the reference grid");
}

double mask_area_km2(const GridGeometry& g, std::span<const std::size_t> cells) noexcept
{
    CompensatedSum s;
    for (std::size_t idx : cells)
        s.add(cell_area_km2(g, idx));
    return s.value();
}

Region make_region(std::string id, std::string country_code, const GridGeometry& grid,
                   std::vector<std::size_t> cells)
{
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    Region r;
    r.id = std::move(id);
    r.country_code = std::move(country_code);
    r.grid = grid;
    r.area_km2 = mask_area_km2(grid, cells);
    r.mask = std::move(cells);
    return r;
}

void Region::validate() const
{
    if (mask.empty())
        throw ContractViolation("region '" + id + "' has an empty mask");
    if (!(area_km2 > 0.0))
        throw ContractViolation("region '" + id + "' has non-positive area");
    for (std::size_t idx : mask)
        if (idx >= grid.size())
            throw ContractViolation("region '" + id + "' mask indexes outside its grid");
    const double cells = mask_area_km2(grid, mask);
    if (std::fabs(cells - area_km2) > 0.005 * cells)
        throw ContractViolation("region '" + id + "' area disagrees with its cell areas");
}

} // namespace h2atlas::geodata
