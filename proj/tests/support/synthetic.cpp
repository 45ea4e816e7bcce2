#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace testsupport {

using namespace h2atlas;

namespace {

class Normal {
public:
    explicit Normal(std::uint64_t seed) : rng_(seed) {}
    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do
            u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace

res_sim::WeatherSeries make_weather(const SiteClimate& c, std::size_t years, std::uint64_t seed)
{
    const std::size_t n = years * res_sim::kHoursPerYear;
    res_sim::WeatherSeries w;
    w.ghi_w_per_m2.resize(n);
    w.air_temp_c.resize(n);
    w.wind_speed_ms.resize(n);
    Normal normal(seed);
    const double rho = c.wind_persistence;
    const double innov = std::sqrt(1.0 - rho * rho);
    double z = 0.0, cloud = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double hour = static_cast<double>(t % 24);
        const double day = static_cast<double>((t / 24) % 365);
        z = rho * z + innov * normal();
        if (t % 24 == 0)
            cloud = 0.6 * cloud + 0.8 * normal();
        const double season = 1.0 + 0.08 * std::cos(2.0 * std::numbers::pi * (day - 172.0) / 365.0);
        const double sun = std::max(0.0, std::sin(std::numbers::pi * (hour - 6.0) / 12.0));
        const double atten = std::clamp(1.0 - c.cloudiness * (1.0 + 0.6 * cloud), 0.1, 1.0);
        w.ghi_w_per_m2[t] = c.ghi_peak * season * sun * atten;
        w.air_temp_c[t] = c.temp_mean_c + 6.0 * std::sin(std::numbers::pi * (hour - 9.0) / 12.0);
        const double diurnal = 1.0 + c.wind_diurnal * std::cos(2.0 * std::numbers::pi * (hour - 2.0) / 24.0);
        w.wind_speed_ms[t] = std::max(0.0, c.wind_mean_ms * diurnal * (1.0 + c.wind_noise * z));
    }
    return w;
}

std::vector<h2opt::TechnologyInput> resource_classes(const res_sim::WeatherSeries& weather, Technology tech,
                                                     const std::vector<double>& multipliers,
                                                     double ceiling_mw_per_class, int year)
{
    std::vector<h2opt::TechnologyInput> out;
    const auto turbine = res_sim::WindTurbine::synthetic_default();
    for (double m : multipliers) {
        res_sim::WeatherSeries w = weather;
        if (tech == Technology::pv)
            for (double& g : w.ghi_w_per_m2)
                g *= m;
        else
            for (double& v : w.wind_speed_ms)
                v *= m;
        h2opt::TechnologyInput ti;
        ti.technology = tech;
        ti.ceiling_mw = ceiling_mw_per_class;
        ti.profile = tech == Technology::pv ? res_sim::simulate_pv(w) : res_sim::simulate_wind(w, turbine);
        ti.economics = res_sim::default_techno_economics(to_string(tech), year);
        out.push_back(std::move(ti));
    }
    return out;
}

h2opt::RegionSystemInputs make_system(std::vector<h2opt::TechnologyInput> techs, int year, bool battery)
{
    auto in = h2opt::default_system("FIX.1_1", year);
    in.technologies = std::move(techs);
    in.battery_offered = battery;
    return in;
}

h2opt::TechnologyInput technology(Technology tech, double ceiling_mw, std::vector<double> cf, int year)
{
    h2opt::TechnologyInput ti;
    ti.technology = tech;
    ti.ceiling_mw = ceiling_mw;
    ti.profile = res_sim::GenerationProfile::from_series(std::move(cf));
    ti.economics = res_sim::default_techno_economics(to_string(tech), year);
    ti.dispatchable = tech == Technology::geothermal;
    return ti;
}

} // namespace testsupport
