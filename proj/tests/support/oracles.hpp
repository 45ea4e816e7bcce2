#pragma once

// Independent reference computations. None of these call into the code they
// check; they restate each definition in the most direct form.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace testsupport {

struct OracleGrid {
    std::size_t n_cols = 0, n_rows = 0;
    double origin_lat = 0.0, cell_size = 0.0;
};

/// Metric distance between two cell centers: columns scaled by
/// 111320 cos(mean latitude), rows by 110540 m per degree.
double oracle_distance_m(const OracleGrid& g, std::size_t r1, std::size_t c1, std::size_t r2, std::size_t c2);

/// All-pairs minimum distance to any feature cell (+inf without features).
std::vector<double> brute_force_distance(const OracleGrid& g, const std::vector<std::uint8_t>& feature);

struct OracleCriterion {
    std::vector<std::uint8_t> feature;
    double buffer_m = 0.0;
};

/// Eligible iff the cell is in the region and, for every criterion, it is
/// neither a feature cell nor nearer than the buffer to one.
std::vector<std::uint8_t> brute_force_eligibility(const OracleGrid& g, const std::vector<std::uint8_t>& region,
                                                  const std::vector<OracleCriterion>& criteria);

/// Battery-free operation: hourly generation beyond the electrolyzer rating
/// is curtailed.
struct GreedyTech {
    std::vector<double> cf;
    double ceiling_mw = 0.0;
    double annual_cost_per_mw = 0.0;
};

struct GreedyResult {
    std::vector<double> capacity_mw;
    double electrolyzer_mw = 0.0;
    double cost = 0.0;
};

/// Annual electrolyzer input (MWh) under greedy dispatch.
double greedy_input_mwh(const std::vector<GreedyTech>& techs, const std::vector<double>& capacity_mw,
                        double electrolyzer_mw);

/// Smallest electrolyzer rating whose greedy input reaches `target_mwh`;
/// negative when unreachable even without an electrolyzer limit.
double min_electrolyzer_mw(const std::vector<GreedyTech>& techs, const std::vector<double>& capacity_mw,
                           double target_mwh);

/// Exhaustive search over `steps`+1 capacity levels per technology between 0
/// and each ceiling, with the electrolyzer sized exactly for each candidate.
/// `zoom_levels` further passes repeat the search on a grid of the same size
/// around the incumbent.
GreedyResult grid_search(const std::vector<GreedyTech>& techs, double electrolyzer_cost_per_mw, double target_mwh,
                         int steps = 20, int zoom_levels = 2);

/// Linear-interpolation quantile of unsorted data, computed by sorting a copy.
double sort_quantile(std::vector<double> values, double q);

} // namespace testsupport
