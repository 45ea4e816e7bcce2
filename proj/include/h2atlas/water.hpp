#pragma once

// Groundwater sustainable yield scenarios, desalination plus pipeline cost,
// and the ordered water-supply options of a region.

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "h2atlas/geodata.hpp"

namespace h2atlas::water {

enum class YieldLevel { conservative, medium, extreme };
enum class Climate { rcp26, rcp85 };

std::string_view to_string(YieldLevel l) noexcept;
std::string_view to_string(Climate c) noexcept;
YieldLevel yield_level_from_string(std::string_view s);
Climate climate_from_string(std::string_view s);

/// 0.10 / 0.40 / 0.70 of recharge available for supplementary use.
double supplementary_share(YieldLevel l) noexcept;

struct YieldScenario {
    YieldLevel level = YieldLevel::medium;
    double share = 0.40;
    Climate climate = Climate::rcp26;
    int horizon = 2020; ///< 2020, 2030 or 2050

    static YieldScenario make(YieldLevel level, Climate climate, int horizon);

    /// Share must equal the level's share exactly; horizon must be supported.
    void validate() const;
    /// Averaging window of the horizon: 2015-2035, 2015-2045, 2036-2065.
    std::pair<int, int> averaging_window() const;
};

/// SY = max(0, share * recharge - consumption) per cell, in mm/yr. Nodata in
/// either input yields nodata.
geodata::RasterGrid sustainable_yield(const geodata::RasterGrid& recharge_mm,
                                      const geodata::RasterGrid& sectoral_consumption_mm,
                                      const YieldScenario& scenario);

struct WaterBudget {
    double volume_m3_per_year = 0.0;
    double mean_mm_per_year = 0.0; ///< area-weighted over cells with data
    std::size_t nodata_cells = 0;  ///< mask cells skipped for missing data
};

/// Sum over the region mask of SY[mm] * 1e-3 * cell area [m²].
WaterBudget region_water_budget(const geodata::RasterGrid& sy_mm, const geodata::Region& region);

struct DesalParams {
    double desal_base_eur_per_m3 = 0.70;
    /// Pipeline capex per (m³/a of capacity) and km, surrogate default.
    double pipeline_capex_eur_per_m3a_km = 0.0115;
    double pipeline_lifetime_years = 40.0;
    double pipeline_wacc = 0.08;
    double friction_kwh_per_m3_km = 0.004; ///< surrogate default
    double pump_efficiency = 0.75;
    double water_density_kg_per_m3 = 1000.0;
    double gravity_m_per_s2 = 9.81;

    void validate() const;
};

/// Pumping energy per m³ for a lift of dh metres (no credit for dh < 0).
double lift_energy_kwh_per_m3(double elevation_gain_m, const DesalParams& p = {});

/// base + pipeline capex * distance * annuity + price * (lift + friction * distance)
double desal_transport_cost(double distance_to_coast_km, double elevation_gain_m,
                            double electricity_price_eur_per_kwh, const DesalParams& p = {});

enum class SupplyKind { groundwater, desalination };
std::string_view to_string(SupplyKind k) noexcept;

struct WaterSupplyOption {
    SupplyKind kind = SupplyKind::desalination;
    double annual_volume_m3 = std::numeric_limits<double>::infinity();
    double cost_eur_per_m3 = 0.0;
};

/// Options sorted ascending by cost (groundwater first on ties). A
/// groundwater option is included even with a zero cap.
std::vector<WaterSupplyOption> supply_curve(double groundwater_cost_eur_per_m3, double groundwater_cap_m3,
                                            double desal_cost_eur_per_m3);

struct WaterDraw {
    double groundwater_m3 = 0.0;
    double desalination_m3 = 0.0;
    double cost_eur = 0.0;
    double blended_eur_per_m3() const noexcept
    {
        const double v = groundwater_m3 + desalination_m3;
        return v > 0.0 ? cost_eur / v : 0.0;
    }
};

/// Drains the options cheapest first. Throws InfeasibleError if demand
/// exceeds every cap combined.
WaterDraw draw_water(std::span<const WaterSupplyOption> options, double demand_m3);

/// Groundwater cap in a supply curve (0 if absent).
double groundwater_cap(std::span<const WaterSupplyOption> options) noexcept;

/// kg H2 -> m³ water.
inline double water_demand_m3(double h2_kg, double water_use_l_per_kg) noexcept
{
    return h2_kg * water_use_l_per_kg * 1e-3;
}

} // namespace h2atlas::water
