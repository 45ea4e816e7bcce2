#pragma once

// Buffered exclusion criteria -> eligible land -> installable capacity.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "h2atlas/geodata.hpp"
#include "h2atlas/technology.hpp"

namespace h2atlas::eligibility {

/// Surrogate default capacity densities [MW/km²]; overridable per run.
inline constexpr double kDefaultPvDensity = 50.0;
inline constexpr double kDefaultWindDensity = 7.5;
inline constexpr double kDefaultGeothermalDensity = 5.0;

double default_density(Technology t);

struct Criterion {
    std::string name;
    Technology technology = Technology::pv;
    geodata::MaskGrid feature; ///< cells occupied by the feature itself
    double buffer_m = 0.0;

    /// buffer_m must be finite and >= 0.
    void validate() const;
};

/// Throws ValidationError on an invalid criterion or a duplicate name within
/// one technology.
void validate_criteria(std::span<const Criterion> criteria);

/// Excluded cells for one criterion. A cell is excluded iff it is a feature
/// cell (distance 0) or its distance is strictly below the buffer.
geodata::MaskGrid apply_criterion(const Criterion& criterion, const geodata::RasterGrid& distance_field);

struct EligibilityResult {
    std::string region_id;
    geodata::MaskGrid eligible;
    /// Share of region land each criterion excludes on its own; may sum past 1.
    std::map<std::string, double> per_criterion_excluded_share;
    double eligible_share = 0.0;
    double eligible_area_km2 = 0.0;
    double region_area_km2 = 0.0;
};

/// Eligible land = region mask minus the union of all criterion exclusions.
/// `distance_fields`, when given, must be parallel to `criteria`; missing
/// fields are computed here.
EligibilityResult combine_exclusions(std::span<const Criterion> criteria, const geodata::Region& region,
                                     std::span<const geodata::RasterGrid> distance_fields = {});

struct PlacementSet {
    Technology technology = Technology::pv;
    geodata::RasterGrid capacity_mw_per_cell;
    double total_capacity_mw = 0.0;
};

/// Every eligible cell receives density x its geodesic area.
PlacementSet place_capacity(const EligibilityResult& result, Technology technology,
                            double density_mw_per_km2);

} // namespace h2atlas::eligibility
