#pragma once

// Synthetic weather and hydrogen-system fixtures shared by the unit tests and
// the acceptance runner.

#include <cstdint>
#include <vector>

#include "h2atlas/h2opt.hpp"
#include "h2atlas/res_sim.hpp"

namespace testsupport {

struct SiteClimate {
    double wind_mean_ms = 7.0;   ///< at 100 m
    double wind_diurnal = 0.0;   ///< relative amplitude, peak at 02:00 when positive
    double wind_persistence = 0.97;
    double wind_noise = 0.35;
    double ghi_peak = 950.0;     ///< clear-sky noon irradiance
    double cloudiness = 0.25;    ///< mean fractional attenuation
    double temp_mean_c = 27.0;
};

/// Deterministic hourly weather for `years` full years.
h2atlas::res_sim::WeatherSeries make_weather(const SiteClimate& climate, std::size_t years, std::uint64_t seed);

/// One technology entry per multiplier. PV scales irradiance, wind scales speed.
std::vector<h2atlas::h2opt::TechnologyInput> resource_classes(const h2atlas::res_sim::WeatherSeries& weather,
                                                              h2atlas::Technology tech,
                                                              const std::vector<double>& multipliers,
                                                              double ceiling_mw_per_class, int year = 2030);

/// Region inputs from the default electrolyzer and battery plus the given technologies.
h2atlas::h2opt::RegionSystemInputs make_system(std::vector<h2atlas::h2opt::TechnologyInput> techs,
                                               int year = 2030, bool battery = true);

/// Profile for a capacity factor series.
h2atlas::h2opt::TechnologyInput technology(h2atlas::Technology tech, double ceiling_mw, std::vector<double> cf,
                                           int year = 2030);

} // namespace testsupport
