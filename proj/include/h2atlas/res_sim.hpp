#pragma once

// Hourly capacity factors for PV, onshore wind, hydropower and geothermal,
// and levelized cost of electricity.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "h2atlas/technology.hpp"

namespace h2atlas::res_sim {

inline constexpr std::size_t kHoursPerYear = 8760;

struct WeatherSeries {
    std::size_t location = 0; ///< cell index on the reference grid
    std::vector<double> ghi_w_per_m2;
    std::vector<double> air_temp_c;
    std::vector<double> wind_speed_ms; ///< at ref_height_m
    double ref_height_m = 100.0;

    std::size_t hours() const noexcept { return ghi_w_per_m2.size(); }
    std::size_t years() const noexcept { return hours() / kHoursPerYear; }

    /// Lengths equal and a multiple of 8760, ghi >= 0, wind >= 0, all finite.
    void validate() const;
};

/// CSV with columns hour_index, ghi, temp_c, wind_ms.
WeatherSeries load_weather_csv(const std::filesystem::path& path, double ref_height_m = 100.0);

struct TechnoEconomics {
    std::string component; ///< "pv", "wind", "electrolyzer", "battery_energy", ...
    int year = 2030;
    double capex_eur_per_kw = 0.0; ///< EUR/kWh for battery energy
    double opex_share_per_year = 0.0;
    double lifetime_years = 0.0;
    double wacc = 0.0;

    void validate() const;
    /// Annuitized capex plus fixed opex, EUR per kW (or kWh) and year.
    double annual_cost_per_kw() const;
};

/// Surrogate defaults, not values published alongside the method. Hydropower
/// costs are constant over the years.
TechnoEconomics default_techno_economics(std::string_view component, int year);

double annuity_factor(double wacc, double lifetime_years);

/// (capex * annuity + capex * opex_share) / aep, in EUR/kWh.
double lcoe(const TechnoEconomics& te, double aep_kwh_per_kw);

struct GenerationProfile {
    std::vector<double> capacity_factor;
    double mean_cf = 0.0;
    double full_load_hours = 0.0; ///< mean_cf * 8760

    /// Validates every sample in [0,1] and derives mean and full-load hours.
    static GenerationProfile from_series(std::vector<double> cf);

    std::size_t hours() const noexcept { return capacity_factor.size(); }
    std::size_t years() const noexcept { return hours() / kHoursPerYear; }
};

/// Hours [year*8760, (year+1)*8760) of a multi-year profile.
GenerationProfile year_slice(const GenerationProfile& p, std::size_t year);

/// Mean cf of each 8760-hour year.
std::vector<double> yearly_means(const GenerationProfile& p);

/// Index of the median year by score (lower median for an even count; ties
/// broken by chronological order).
std::size_t representative_year(std::span<const double> yearly_scores);

struct PvParams {
    double performance_ratio = 0.85;
    double temp_coefficient_per_k = -0.0035;
    double k_noct = 25.0; ///< cell heating at 800 W/m², K
};

/// cf = clip((ghi/1000) * PR * (1 + gamma (T_cell - 25)), 0, 1)
/// with T_cell = T_air + k_noct * ghi / 800.
double pv_capacity_factor(double ghi_w_per_m2, double air_temp_c, const PvParams& p = {});
GenerationProfile simulate_pv(const WeatherSeries& weather, const PvParams& params = {});

struct PowerCurvePoint {
    double speed_ms = 0.0;
    double power_kw = 0.0;
};

/// Tabulated turbine with monotone piecewise-cubic (Fritsch-Carlson)
/// interpolation between table points.
class WindTurbine {
public:
    WindTurbine(std::vector<PowerCurvePoint> curve, double hub_height_m, double cut_in_ms,
                double rated_speed_ms, double cut_out_ms);

    /// Synthetic default: cut-in 3, rated 12, cut-out 25 m/s, hub 120 m,
    /// cubic ramp tabulated every 0.5 m/s.
    static WindTurbine synthetic_default();

    static WindTurbine from_csv(const std::filesystem::path& path, double hub_height_m = 120.0);

    double power_kw(double speed_ms) const;
    double rated_power_kw() const noexcept { return rated_kw_; }
    double hub_height_m() const noexcept { return hub_height_m_; }
    double cut_in_ms() const noexcept { return cut_in_; }
    double rated_speed_ms() const noexcept { return rated_speed_; }
    double cut_out_ms() const noexcept { return cut_out_; }
    const std::vector<PowerCurvePoint>& curve() const noexcept { return curve_; }

private:
    void validate();

    std::vector<PowerCurvePoint> curve_;
    std::vector<double> slopes_;
    double hub_height_m_;
    double cut_in_;
    double rated_speed_;
    double cut_out_;
    double rated_kw_ = 0.0;
};

inline constexpr double kDefaultShearExponent = 0.14;

/// Power-law shear to hub height, then cf = curve(v_hub) / rated.
GenerationProfile simulate_wind(const WeatherSeries& weather, const WindTurbine& turbine,
                                double shear_exponent = kDefaultShearExponent);

struct HydroSample {
    double hour = 0.0;  ///< hours since start of the series
    double value = 0.0; ///< capacity factor
};

inline constexpr double kMaxHydroGapHours = 30.0 * 24.0;

/// Linear interpolation onto hour midpoints t + 0.5, t in [0, hours); held
/// flat before the first and after the last sample. Gaps above 30 days raise
/// DataQualityError.
GenerationProfile resample_hydro(std::span<const HydroSample> source, std::size_t hours = kHoursPerYear);

/// Trapezoidal integral of the interpolant over [0, hours], same end handling.
double hydro_trapezoid_energy(std::span<const HydroSample> source, double hours);

/// Dispatchable flat ceiling at `availability` (in (0,1]).
GenerationProfile geothermal_profile(double availability, std::size_t hours = kHoursPerYear);

/// Realized output when a dispatcher asks for `requested_cf` below a ceiling profile.
GenerationProfile dispatch_below_ceiling(const GenerationProfile& ceiling, std::span<const double> requested_cf);

} // namespace h2atlas::res_sim
