#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "h2atlas/format.hpp"
#include "h2atlas/geodata.hpp"
#include "h2atlas/pipeline.hpp"

namespace h2atlas::pipeline::detail {

/// Runs fn(0..n-1) on up to `threads` workers. Exceptions are rethrown for
/// the lowest failing index so that error reporting is deterministic.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

void write_table(const fs::path& path, std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

/// Regions as written by the eligibility stage, in region-index order.
struct RegionSet {
    geodata::GridGeometry grid;
    std::vector<geodata::Region> regions;
    std::vector<std::int32_t> cell_region; ///< -1 outside every region
};

RegionSet load_region_set(const RunConfig& c);

fs::path stage_path(const RunConfig& c, Stage s);

/// Equal-interval classes over the finite values, colored along a fixed ramp.
std::string render_choropleth(const geodata::GridGeometry& grid, const std::vector<double>& cell_values,
                              const std::string& title, const std::string& unit, int classes);

struct CurveSeries {
    std::string label;
    std::vector<std::pair<double, double>> steps; ///< (cumulative TWh, EUR/kg), ascending
};

/// Step plot of cost-potential curves.
std::string render_curves(const std::vector<CurveSeries>& series, const std::string& title);

/// Region-level values mapped onto cells for a choropleth.
std::vector<double> region_values_to_cells(const RegionSet& rs, const std::map<std::string, double>& by_gid);

void render_stage(const RunConfig& c, Stage s);

} // namespace h2atlas::pipeline::detail
