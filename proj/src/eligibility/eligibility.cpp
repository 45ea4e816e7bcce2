#include "h2atlas/eligibility.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "h2atlas/errors.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::eligibility {

double default_density(Technology t)
{
    switch (t) {
    case Technology::pv: return kDefaultPvDensity;
    case Technology::wind: return kDefaultWindDensity;
    case Technology::geothermal: return kDefaultGeothermalDensity;
    case Technology::hydro: break;
    }
    throw ValidationError("hydropower capacity is exogenous and has no placement density");
}

void Criterion::validate() const
{
    if (!std::isfinite(buffer_m) || buffer_m < 0.0)
        throw ValidationError("criterion '" + name + "': buffer_m must be finite and >= 0");
    if (name.empty())
        throw ValidationError("criterion without a name");
}

void validate_criteria(std::span<const Criterion> criteria)
{
    std::set<std::pair<Technology, std::string>> seen;
    for (const auto& c : criteria) {
        c.validate();
        if (!seen.emplace(c.technology, c.name).second)
            throw ValidationError("duplicate criterion '" + c.name + "' for "
                                  + std::string(to_string(c.technology)));
    }
}

geodata::MaskGrid apply_criterion(const Criterion& criterion, const geodata::RasterGrid& distance_field)
{
    criterion.validate();
    geodata::require_aligned(distance_field.geometry(), criterion.feature.geometry(),
                             "distance field of '" + criterion.name + "'");
    geodata::MaskGrid excluded(distance_field.geometry());
    for (std::size_t i = 0; i < distance_field.size(); ++i) {
        const double d = distance_field[i];
        excluded.set(i, d == 0.0 || d < criterion.buffer_m);
    }
    return excluded;
}

EligibilityResult combine_exclusions(std::span<const Criterion> criteria, const geodata::Region& region,
                                     std::span<const geodata::RasterGrid> distance_fields)
{
    if (region.mask.empty())
        throw ContractViolation("combine_exclusions: region '" + region.id + "' has an empty mask");
    validate_criteria(criteria);
    if (!distance_fields.empty() && distance_fields.size() != criteria.size())
        throw ContractViolation("combine_exclusions: distance_fields must be parallel to criteria");

    const auto& g = region.grid;
    std::vector<std::uint8_t> union_excluded(g.size(), 0);
    EligibilityResult res;
    res.region_id = region.id;

    const double land_km2 = geodata::mask_area_km2(g, region.mask);
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto& crit = criteria[k];
        geodata::require_aligned(crit.feature.geometry(), g, "criterion '" + crit.name + "'");
        const auto excluded = distance_fields.empty()
            ? apply_criterion(crit, geodata::distance_to_feature(crit.feature))
            : apply_criterion(crit, distance_fields[k]);
        CompensatedSum area;
        for (std::size_t idx : region.mask) {
            if (excluded[idx]) {
                area.add(geodata::cell_area_km2(g, idx));
                union_excluded[idx] = 1;
            }
        }
        res.per_criterion_excluded_share[crit.name] = area.value() / land_km2;
    }

    res.eligible = geodata::MaskGrid(g);
    CompensatedSum eligible_area;
    for (std::size_t idx : region.mask) {
        if (!union_excluded[idx]) {
            res.eligible.set(idx, true);
            eligible_area.add(geodata::cell_area_km2(g, idx));
        }
    }
    res.region_area_km2 = land_km2;
    res.eligible_area_km2 = eligible_area.value();
    res.eligible_share = res.eligible_area_km2 / land_km2;
    return res;
}

PlacementSet place_capacity(const EligibilityResult& result, Technology technology,
                            double density_mw_per_km2)
{
    if (!(density_mw_per_km2 > 0.0) || !std::isfinite(density_mw_per_km2))
        throw ValidationError("capacity density must be positive");
    const auto& g = result.eligible.geometry();
    PlacementSet p;
    p.technology = technology;
    p.capacity_mw_per_cell = geodata::RasterGrid(g, geodata::RasterGrid::kDefaultNodata, 0.0);
    CompensatedSum total;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!result.eligible[i])
            continue;
        const double mw = density_mw_per_km2 * geodata::cell_area_km2(g, i);
        p.capacity_mw_per_cell[i] = mw;
        total.add(mw);
    }
    p.total_capacity_mw = total.value();
    return p;
}

} // namespace h2atlas::eligibility
