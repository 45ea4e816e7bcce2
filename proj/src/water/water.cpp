#include "h2atlas/water.hpp"

#include <algorithm>
#include <cmath>

#include "h2atlas/errors.hpp"
#include "h2atlas/numeric.hpp"
#include "h2atlas/res_sim.hpp"

namespace h2atlas::water {

std::string_view to_string(YieldLevel l) noexcept
{
    switch (l) {
    case YieldLevel::conservative: return "conservative";
    case YieldLevel::medium: return "medium";
    case YieldLevel::extreme: return "extreme";
    }
    return "?";
}

std::string_view to_string(Climate c) noexcept
{
    return c == Climate::rcp26 ? "rcp26" : "rcp85";
}

YieldLevel yield_level_from_string(std::string_view s)
{
    if (s == "conservative")
        return YieldLevel::conservative;
    if (s == "medium")
        return YieldLevel::medium;
    if (s == "extreme")
        return YieldLevel::extreme;
    throw ValidationError("unknown water scenario '" + std::string(s) + "'");
}

Climate climate_from_string(std::string_view s)
{
    if (s == "rcp26")
        return Climate::rcp26;
    if (s == "rcp85")
        return Climate::rcp85;
    throw ValidationError("unknown climate scenario '" + std::string(s) + "'");
}

double supplementary_share(YieldLevel l) noexcept
{
    switch (l) {
    case YieldLevel::conservative: return 0.10;
    case YieldLevel::medium: return 0.40;
    case YieldLevel::extreme: return 0.70;
    }
    return 0.0;
}

YieldScenario YieldScenario::make(YieldLevel level, Climate climate, int horizon)
{
    YieldScenario s{level, supplementary_share(level), climate, horizon};
    s.validate();
    return s;
}

void YieldScenario::validate() const
{
    if (share != supplementary_share(level))
        throw ValidationError("supplementary share of the " + std::string(to_string(level))
                              + " scenario must be " + std::to_string(supplementary_share(level)));
    averaging_window();
}

std::pair<int, int> YieldScenario::averaging_window() const
{
    switch (horizon) {
    case 2020: return {2015, 2035};
    case 2030: return {2015, 2045};
    case 2050: return {2036, 2065};
    default: throw ValidationError("water horizon must be 2020, 2030 or 2050");
    }
}

geodata::RasterGrid sustainable_yield(const geodata::RasterGrid& recharge_mm,
                                      const geodata::RasterGrid& consumption_mm, const YieldScenario& scenario)
{
    scenario.validate();
    geodata::require_aligned(recharge_mm.geometry(), consumption_mm.geometry(), "sectoral consumption raster");
    geodata::RasterGrid sy(recharge_mm.geometry(), recharge_mm.nodata(), 0.0);
    for (std::size_t i = 0; i < sy.size(); ++i) {
        if (recharge_mm.is_nodata(i) || consumption_mm.is_nodata(i)) {
            sy[i] = sy.nodata();
            continue;
        }
        const double r = recharge_mm[i], c = consumption_mm[i];
        if (r < 0.0)
            throw InputError("negative recharge at cell " + std::to_string(i));
        if (c < 0.0)
            throw InputError("negative sectoral consumption at cell " + std::to_string(i));
        sy[i] = std::max(0.0, scenario.share * r - c);
    }
    return sy;
}

WaterBudget region_water_budget(const geodata::RasterGrid& sy_mm, const geodata::Region& region)
{
    geodata::require_aligned(sy_mm.geometry(), region.grid, "sustainable yield raster");
    CompensatedSum volume, area;
    WaterBudget b;
    for (std::size_t idx : region.mask) {
        if (sy_mm.is_nodata(idx)) {
            ++b.nodata_cells;
            continue;
        }
        const double a_m2 = geodata::cell_area_km2(region.grid, idx) * 1e6;
        volume.add(sy_mm[idx] * 1e-3 * a_m2);
        area.add(a_m2);
    }
    b.volume_m3_per_year = volume.value();
    b.mean_mm_per_year = area.value() > 0.0 ? b.volume_m3_per_year * 1e3 / area.value() : 0.0;
    return b;
}

void DesalParams::validate() const
{
    if (!(desal_base_eur_per_m3 > 0.0))
        throw ValidationError("desalination base cost must be positive");
    if (!(pipeline_capex_eur_per_m3a_km >= 0.0) || !(friction_kwh_per_m3_km >= 0.0))
        throw ValidationError("pipeline capex and friction must be >= 0");
    if (!(pump_efficiency > 0.0 && pump_efficiency <= 1.0))
        throw ValidationError("pump efficiency must lie in (0,1]");
    if (!(pipeline_lifetime_years >= 1.0) || !(pipeline_wacc > 0.0 && pipeline_wacc < 1.0))
        throw ValidationError("pipeline lifetime must be >= 1 and wacc in (0,1)");
}

double lift_energy_kwh_per_m3(double dh, const DesalParams& p)
{
    return p.water_density_kg_per_m3 * p.gravity_m_per_s2 * std::max(0.0, dh) / (3.6e6 * p.pump_efficiency);
}

double desal_transport_cost(double distance_km, double dh, double price, const DesalParams& p)
{
    p.validate();
    if (!(distance_km >= 0.0))
        throw InputError("distance to coast must be >= 0");
    if (!(price >= 0.0))
        throw InputError("electricity price must be >= 0");
    const double annuity = res_sim::annuity_factor(p.pipeline_wacc, p.pipeline_lifetime_years);
    const double pipeline = p.pipeline_capex_eur_per_m3a_km * distance_km * annuity;
    const double energy = lift_energy_kwh_per_m3(dh, p) + p.friction_kwh_per_m3_km * distance_km;
    return p.desal_base_eur_per_m3 + pipeline + price * energy;
}

std::string_view to_string(SupplyKind k) noexcept
{
    return k == SupplyKind::groundwater ? "groundwater" : "desalination";
}

std::vector<WaterSupplyOption> supply_curve(double gw_cost, double gw_cap, double desal_cost)
{
    if (!(desal_cost > 0.0))
        throw ValidationError("desalination cost must be positive");
    if (!(gw_cost > 0.0))
        throw ValidationError("groundwater cost must be positive");
    if (!(gw_cap >= 0.0))
        throw ValidationError("groundwater volume must be >= 0");
    std::vector<WaterSupplyOption> opts{
        {SupplyKind::groundwater, gw_cap, gw_cost},
        {SupplyKind::desalination, std::numeric_limits<double>::infinity(), desal_cost},
    };
    std::stable_sort(opts.begin(), opts.end(), [](const auto& a, const auto& b) {
        return a.cost_eur_per_m3 < b.cost_eur_per_m3;
    });
    return opts;
}

WaterDraw draw_water(std::span<const WaterSupplyOption> options, double demand_m3)
{
    if (!(demand_m3 >= 0.0))
        throw InputError("water demand must be >= 0");
    WaterDraw d;
    double left = demand_m3;
    for (const auto& o : options) {
        if (left <= 0.0)
            break;
        const double take = std::min(left, o.annual_volume_m3);
        (o.kind == SupplyKind::groundwater ? d.groundwater_m3 : d.desalination_m3) += take;
        d.cost_eur += take * o.cost_eur_per_m3;
        left -= take;
    }
    if (left > 0.0)
        throw InfeasibleError("water demand exceeds all supply options", "water supply caps");
    return d;
}

double groundwater_cap(std::span<const WaterSupplyOption> options) noexcept
{
    double cap = 0.0;
    for (const auto& o : options)
        if (o.kind == SupplyKind::groundwater)
            cap += o.annual_volume_m3;
    return cap;
}

} // namespace h2atlas::water
