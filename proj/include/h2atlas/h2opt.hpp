#pragma once

// Per-region cost-minimal hydrogen systems, cost-potential curves, water
// sourcing, national demand set-aside and national aggregation.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "h2atlas/res_sim.hpp"
#include "h2atlas/technology.hpp"
#include "h2atlas/water.hpp"

namespace h2atlas::h2opt {

inline constexpr double kLhvKwhPerKg = 33.33;
inline constexpr double kDefaultBatteryRoundTrip = 0.92;
inline constexpr double kDefaultWaterUseLPerKg = 10.0;

/// Default electrolyzer efficiency in kWh/kg: 50, 48, 46, 44 for 2020, 2030,
/// 2040, 2050.
double default_electrolyzer_efficiency(int year);

inline const std::vector<double> kDefaultSteps{0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00};

struct TechnologyInput {
    Technology technology = Technology::pv;
    double ceiling_mw = 0.0;
    res_sim::GenerationProfile profile; ///< availability ceiling for dispatchable techs
    res_sim::TechnoEconomics economics;
    bool dispatchable = false; ///< geothermal may run below its profile
};

struct RegionSystemInputs {
    std::string region_id;
    std::vector<TechnologyInput> technologies;
    res_sim::TechnoEconomics electrolyzer;
    double efficiency_kwh_per_kg = 48.0;
    bool battery_offered = true;
    res_sim::TechnoEconomics battery_energy; ///< per kWh
    res_sim::TechnoEconomics battery_power;  ///< per kW
    double battery_round_trip = kDefaultBatteryRoundTrip;
    std::vector<water::WaterSupplyOption> water; ///< empty means no water cost
    double water_use_l_per_kg = kDefaultWaterUseLPerKg;

    std::size_t hours() const;
    /// Ceilings >= 0, equal profile lengths, efficiency >= LHV, economics valid.
    void validate() const;
    /// Annual electricity from every technology at its ceiling, MWh.
    double max_generation_mwh() const;
};

/// Surrogate defaults for the electrolyzer and battery of `year`.
RegionSystemInputs default_system(std::string region_id, int year);

/// Full conversion of all generable electricity, as TWh of H2 (LHV).
double max_h2_potential_twh(const RegionSystemInputs& inputs);
/// Same potential in kg/a.
double max_h2_potential_kg(const RegionSystemInputs& inputs);

struct SystemDesign {
    std::string region_id;
    std::map<Technology, double> capacity_mw;
    double electrolyzer_mw = 0.0;
    double battery_mwh = 0.0;
    double battery_mw = 0.0;

    double target_h2_kg = 0.0;
    double annual_h2_kg = 0.0;
    double electrolyzer_input_mwh = 0.0;
    double electrolyzer_flh = 0.0;
    double generation_mwh = 0.0; ///< produced, incl. what is curtailed
    double curtailed_mwh = 0.0;
    double curtailed_share = 0.0;
    double battery_loss_mwh = 0.0;

    double system_cost_eur = 0.0; ///< annualized capex + opex
    double water_m3 = 0.0;
    double water_cost_eur = 0.0;
    double water_cost_share = 0.0; ///< of total annual cost
    double lcoh_eur_per_kg = 0.0;

    double total_cost_eur() const noexcept { return system_cost_eur + water_cost_eur; }
};

/// Annualized system cost of given capacities (EUR/a), without water. Each
/// technology is priced with the economics of its first entry in `inputs`.
double annual_capacity_cost(const RegionSystemInputs& inputs, const std::map<Technology, double>& capacity_mw,
                            double electrolyzer_mw, double battery_mwh = 0.0, double battery_mw = 0.0);

/// Water cost of producing `h2_kg` (EUR/a).
double water_cost(const RegionSystemInputs& inputs, double h2_kg);

/// Minimizes annualized cost for a fixed annual H2 target over hourly
/// dispatch with a cyclic battery. Throws InfeasibleError when the target
/// exceeds the generable potential.
SystemDesign optimize_system(const RegionSystemInputs& inputs, double h2_target_kg);

/// Same problem as one monolithic hourly LP. Slow on full years; meant for
/// cross-checks on short horizons.
SystemDesign optimize_system_reference_lp(const RegionSystemInputs& inputs, double h2_target_kg);

struct CurvePoint {
    double step = 0.0;
    double h2_twh = 0.0; ///< cumulative, LHV
    double lcoh_eur_per_kg = 0.0;
    SystemDesign design;
};

struct CostPotentialCurve {
    std::string region_id;
    double potential_twh = 0.0;
    std::vector<CurvePoint> points;
    double groundwater_feasible_share = 0.0;
    double reserved_for_demand_twh = 0.0;
};

/// One solve per step at target = step * max potential.
CostPotentialCurve cost_potential_curve(const RegionSystemInputs& inputs,
                                        std::span<const double> steps = kDefaultSteps);

struct StepWater {
    double step = 0.0;
    double water_m3 = 0.0;
    double groundwater_m3 = 0.0;
    double desalination_m3 = 0.0;
    double water_cost_share = 0.0;
    bool groundwater_sufficient = false;
};

struct WaterShareReport {
    double feasible_share = 0.0; ///< largest step served by groundwater alone
    std::vector<StepWater> steps;
};

WaterShareReport groundwater_feasible_share(const CostPotentialCurve& curve, const RegionSystemInputs& inputs);

struct CurveSegment {
    std::string region_id;
    double step = 0.0;
    double h2_twh = 0.0; ///< segment quantity
    double lcoh_eur_per_kg = 0.0;
};

struct NationalCurve {
    std::string country;
    std::vector<CurveSegment> segments; ///< sorted by LCOH
    std::vector<double> steps;
    std::vector<double> weighted_mean_lcoh; ///< per step, weighted by step quantities

    double total_twh() const noexcept;
};

/// Pools per-region step segments, sorted by LCOH (ties by region id, step).
NationalCurve aggregate_national(std::string country, std::span<const CostPotentialCurve> regions);

struct DemandInputs {
    double electricity_twh = 0.0;
    bool electricity_is_h2_equivalent = false;
    double h2_twh = 0.0;
};

struct SetAsideResult {
    double reserved_twh = 0.0;
    double reserved_share = 0.0; ///< of the national potential, may exceed 1
    bool over_demand = false;
    NationalCurve exportable; ///< empty when over_demand
};

/// Electricity demand converted to H2 at LHV/efficiency unless flagged, plus
/// H2 demand; reserved from the cheapest end.
double reserved_h2_twh(const DemandInputs& demand, double efficiency_kwh_per_kg);
SetAsideResult demand_set_aside(const NationalCurve& national, const DemandInputs& demand,
                                double efficiency_kwh_per_kg);

} // namespace h2atlas::h2opt
