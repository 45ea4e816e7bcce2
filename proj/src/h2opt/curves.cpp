#include <algorithm>
#include <cmath>

#include "h2atlas/errors.hpp"
#include "h2atlas/h2opt.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::h2opt {

namespace {

void check_steps(std::span<const double> steps)
{
    if (steps.empty())
        throw ValidationError("expansion steps must not be empty");
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (!(steps[k] > 0.0 && steps[k] <= 1.0))
            throw ValidationError("steps must lie in (0,1]");
        if (k && !(steps[k] > steps[k - 1]))
            throw ValidationError("steps must increase strictly");
    }
}

} // namespace

CostPotentialCurve cost_potential_curve(const RegionSystemInputs& inputs, std::span<const double> steps)
{
    check_steps(steps);
    CostPotentialCurve c;
    c.region_id = inputs.region_id;
    const double potential_kg = max_h2_potential_kg(inputs);
    c.potential_twh = potential_kg * kLhvKwhPerKg * 1e-9;
    if (!(potential_kg > 0.0))
        throw InfeasibleError(inputs.region_id + ": no generable potential", "all generation ceilings are zero");
    for (double s : steps) {
        CurvePoint p;
        p.step = s;
        p.h2_twh = s * c.potential_twh;
        p.design = optimize_system(inputs, s * potential_kg);
        p.lcoh_eur_per_kg = p.design.lcoh_eur_per_kg;
        c.points.push_back(std::move(p));
    }
    return c;
}

WaterShareReport groundwater_feasible_share(const CostPotentialCurve& curve, const RegionSystemInputs& inputs)
{
    if (inputs.water.empty())
        throw ContractViolation(inputs.region_id + ": groundwater_feasible_share needs a water supply curve");
    const double cap = water::groundwater_cap(inputs.water);
    WaterShareReport r;
    for (const auto& p : curve.points) {
        StepWater w;
        w.step = p.step;
        w.water_m3 = water::water_demand_m3(p.design.annual_h2_kg, inputs.water_use_l_per_kg);
        const auto draw = water::draw_water(inputs.water, w.water_m3);
        w.groundwater_m3 = draw.groundwater_m3;
        w.desalination_m3 = draw.desalination_m3;
        w.water_cost_share = p.design.water_cost_share;
        w.groundwater_sufficient = w.water_m3 <= cap;
        if (w.groundwater_sufficient)
            r.feasible_share = std::max(r.feasible_share, p.step);
        r.steps.push_back(w);
    }
    return r;
}

double NationalCurve::total_twh() const noexcept
{
    CompensatedSum s;
    for (const auto& seg : segments)
        s.add(seg.h2_twh);
    return s.value();
}

NationalCurve aggregate_national(std::string country, std::span<const CostPotentialCurve> regions)
{
    if (regions.empty())
        throw ContractViolation("aggregate_national: no regions for " + country);
    NationalCurve n;
    n.country = std::move(country);
    for (const auto& p : regions.front().points)
        n.steps.push_back(p.step);
    for (const auto& r : regions) {
        if (r.points.size() != n.steps.size())
            throw ContractViolation("aggregate_national: regions use different expansion steps");
        double prev = 0.0;
        for (std::size_t k = 0; k < r.points.size(); ++k) {
            if (r.points[k].step != n.steps[k])
                throw ContractViolation("aggregate_national: regions use different expansion steps");
            n.segments.push_back({r.region_id, r.points[k].step, r.points[k].h2_twh - prev,
                                  r.points[k].lcoh_eur_per_kg});
            prev = r.points[k].h2_twh;
        }
    }
    std::sort(n.segments.begin(), n.segments.end(), [](const CurveSegment& a, const CurveSegment& b) {
        if (a.lcoh_eur_per_kg != b.lcoh_eur_per_kg)
            return a.lcoh_eur_per_kg < b.lcoh_eur_per_kg;
        if (a.region_id != b.region_id)
            return a.region_id < b.region_id;
        return a.step < b.step;
    });
    for (std::size_t k = 0; k < n.steps.size(); ++k) {
        CompensatedSum weighted, weight;
        for (const auto& r : regions) {
            weighted.add(r.points[k].h2_twh * r.points[k].lcoh_eur_per_kg);
            weight.add(r.points[k].h2_twh);
        }
        n.weighted_mean_lcoh.push_back(weight.value() > 0.0 ? weighted.value() / weight.value() : 0.0);
    }
    return n;
}

double reserved_h2_twh(const DemandInputs& demand, double efficiency_kwh_per_kg)
{
    if (!(demand.electricity_twh >= 0.0) || !(demand.h2_twh >= 0.0))
        throw ValidationError("demands must be >= 0");
    if (!(efficiency_kwh_per_kg >= kLhvKwhPerKg))
        throw ValidationError("electrolyzer efficiency below the LHV floor");
    const double elec_h2 = demand.electricity_is_h2_equivalent
        ? demand.electricity_twh
        : demand.electricity_twh * kLhvKwhPerKg / efficiency_kwh_per_kg;
    return elec_h2 + demand.h2_twh;
}

SetAsideResult demand_set_aside(const NationalCurve& national, const DemandInputs& demand,
                                double efficiency_kwh_per_kg)
{
    SetAsideResult r;
    r.reserved_twh = reserved_h2_twh(demand, efficiency_kwh_per_kg);
    const double total = national.total_twh();
    r.reserved_share = total > 0.0 ? r.reserved_twh / total : (r.reserved_twh > 0.0 ? INFINITY : 0.0);
    r.over_demand = r.reserved_twh > total;
    r.exportable.country = national.country;
    r.exportable.steps = national.steps;
    r.exportable.weighted_mean_lcoh = national.weighted_mean_lcoh;
    if (r.over_demand)
        return r;
    double left = r.reserved_twh;
    for (const auto& seg : national.segments) {
        if (left >= seg.h2_twh) {
            left -= seg.h2_twh;
            continue;
        }
        CurveSegment rest = seg;
        rest.h2_twh = seg.h2_twh - left;
        left = 0.0;
        r.exportable.segments.push_back(rest);
    }
    return r;
}

} // namespace h2atlas::h2opt
