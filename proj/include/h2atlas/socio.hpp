#pragma once

// Socio-economic sub-indicators (energy access, macroeconomic effect, other
// effects), their composite score and per-country distribution statistics.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "h2atlas/geodata.hpp"

namespace h2atlas::socio {

/// All layers share one grid. Country scalars are broadcast onto it with
/// broadcast_country_values. Nodata in any layer propagates to the outputs.
struct SocioInputs {
    geodata::RasterGrid electricity_access;  ///< fraction
    geodata::RasterGrid clean_fuel_access;   ///< fraction
    geodata::RasterGrid population_density;  ///< capita/km²
    geodata::RasterGrid unemployment_rate;   ///< fraction
    geodata::RasterGrid labor_force_density; ///< capita/km²
    geodata::RasterGrid employment_factor;   ///< jobs/MWp
    geodata::RasterGrid biomass_dependence;  ///< fraction
    geodata::RasterGrid poverty_headcount;   ///< fraction

    /// Alignment and value domains; throws AlignmentError / InputError.
    void validate() const;
};

/// Cells of each region get the value of its country; unlisted countries and
/// unassigned cells are nodata.
geodata::RasterGrid broadcast_country_values(const geodata::GridGeometry& grid,
                                             std::span<const geodata::Region> regions,
                                             const std::map<std::string, double>& by_iso3);

struct AccessWeights {
    double electricity = 0.5; ///< surrogate default
    double clean_fuel = 0.5;  ///< surrogate default
};

/// AE = (1 - (w_e * electricity + w_f * clean fuel)) * population density.
geodata::RasterGrid energy_access_indicator(const SocioInputs& in, const AccessWeights& w = {});

/// ME = employment factor * unemployment * labor force density, divided by
/// the extent maximum of the installable density (MWp/km²).
geodata::RasterGrid macroeconomic_indicator(const SocioInputs& in,
                                            const geodata::RasterGrid& installable_density_mwp_per_km2);

/// OE = mean of biomass dependence and poverty headcount.
geodata::RasterGrid other_effects_indicator(const SocioInputs& in);

struct CompositeWeights {
    double ae = 1.0; ///< surrogate default
    double me = 1.0; ///< surrogate default
    double oe = 1.0; ///< surrogate default
};

struct CompositeResult {
    geodata::RasterGrid score; ///< [0, 100]
    std::vector<std::string> warnings;
};

/// Min-max normalizes each layer to [0, 100] over its valid cells and takes
/// the weighted mean. A constant layer contributes 50 and a warning.
CompositeResult composite_indicator(const geodata::RasterGrid& ae, const geodata::RasterGrid& me,
                                    const geodata::RasterGrid& oe, const CompositeWeights& w = {});

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

struct IndicatorStats {
    std::string country; ///< ISO3
    std::size_t cells = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double iqr = 0.0;
    double mean = 0.0;
};

/// Statistics over the valid cells of every region of a country, ordered by
/// ISO3. Countries without a valid cell are omitted.
std::vector<IndicatorStats> regional_stats(const geodata::RasterGrid& indicator,
                                           std::span<const geodata::Region> regions);

} // namespace h2atlas::socio
