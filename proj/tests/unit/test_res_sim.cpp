#include <doctest.h>

#include <cmath>
#include <random>

#include "h2atlas/errors.hpp"
#include "h2atlas/numeric.hpp"
#include "h2atlas/res_sim.hpp"

using namespace h2atlas;
using namespace h2atlas::res_sim;

namespace {

WeatherSeries constant_weather(double ghi, double temp, double wind, std::size_t years = 1)
{
    WeatherSeries w;
    w.ghi_w_per_m2.assign(years * kHoursPerYear, ghi);
    w.air_temp_c.assign(years * kHoursPerYear, temp);
    w.wind_speed_ms.assign(years * kHoursPerYear, wind);
    return w;
}

TechnoEconomics te(double capex, double opex, double wacc, double n)
{
    TechnoEconomics t;
    t.component = "test";
    t.capex_eur_per_kw = capex;
    t.opex_share_per_year = opex;
    t.wacc = wacc;
    t.lifetime_years = n;
    return t;
}

} // namespace

TEST_CASE("pv closed form")
{
    // cell 25 + 25*1000/800 = 56.25 C
    CHECK(pv_capacity_factor(1000.0, 25.0) == doctest::Approx(0.85 * (1 - 0.0035 * 31.25)).epsilon(1e-12));
    CHECK(pv_capacity_factor(1000.0, 25.0) == doctest::Approx(0.757).epsilon(1e-3));
    CHECK(pv_capacity_factor(0.0, 30.0) == 0.0);
    CHECK(pv_capacity_factor(800.0, 35.0) < pv_capacity_factor(800.0, 20.0));
    CHECK_THROWS_AS(pv_capacity_factor(-1.0, 20.0), InputError);

    const auto p = simulate_pv(constant_weather(250.0, 20.0, 5.0));
    CHECK(p.full_load_hours == 8760.0 * pv_capacity_factor(250.0, 20.0));
}

TEST_CASE("weather validation")
{
    auto w = constant_weather(100.0, 20.0, 5.0);
    w.ghi_w_per_m2[7] = -3.0;
    CHECK_THROWS_AS(simulate_pv(w), InputError);
    auto short_w = constant_weather(100.0, 20.0, 5.0);
    short_w.wind_speed_ms.pop_back();
    CHECK_THROWS_AS(short_w.validate(), InputError);
}

TEST_CASE("synthetic turbine")
{
    const auto t = WindTurbine::synthetic_default();
    CHECK(t.power_kw(2.9) == 0.0);
    CHECK(t.power_kw(12.0) == t.rated_power_kw());
    CHECK(t.power_kw(25.5) == 0.0);
    CHECK(t.hub_height_m() == 120.0);

    SUBCASE("speeds on table nodes reproduce the table exactly")
    {
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> node(0, 50);
        WeatherSeries w = constant_weather(0.0, 20.0, 0.0);
        w.ref_height_m = t.hub_height_m(); // no shear
        double oracle = 0.0;
        for (auto& v : w.wind_speed_ms) {
            const auto& pt = t.curve()[static_cast<std::size_t>(node(rng))];
            v = pt.speed_ms;
            oracle += (v > 25.0 ? 0.0 : pt.power_kw) / t.rated_power_kw();
        }
        const auto p = simulate_wind(w, t);
        CHECK(p.mean_cf == doctest::Approx(oracle / 8760.0).epsilon(1e-12));
    }
    SUBCASE("between nodes the curve stays between its neighbours")
    {
        const auto& c = t.curve();
        for (std::size_t k = 0; k + 1 < c.size(); ++k)
            for (double s : {0.1, 0.37, 0.5, 0.81}) {
                const double v = c[k].speed_ms + s * (c[k + 1].speed_ms - c[k].speed_ms);
                const double p = t.power_kw(v);
                if (v < t.cut_in_ms() || v > t.cut_out_ms())
                    continue;
                CHECK(p >= std::min(c[k].power_kw, c[k + 1].power_kw) - 1e-9);
                CHECK(p <= std::max(c[k].power_kw, c[k + 1].power_kw) + 1e-9);
            }
    }
    SUBCASE("hub height raises output below rated")
    {
        WeatherSeries w = constant_weather(0.0, 20.0, 6.0);
        const auto low = simulate_wind(w, t, 0.14);
        w.ref_height_m = 60.0;
        const auto high = simulate_wind(w, t, 0.14);
        CHECK(high.mean_cf > low.mean_cf);
    }
    SUBCASE("non-monotone curve below rated is rejected")
    {
        std::vector<PowerCurvePoint> bad{{0, 0}, {3, 0}, {6, 500}, {8, 400}, {12, 2000}, {25, 2000}};
        CHECK_THROWS_AS(WindTurbine(bad, 100.0, 3.0, 12.0, 25.0), ValidationError);
    }
}

TEST_CASE("hydropower resampling")
{
    SUBCASE("constant")
    {
        std::vector<HydroSample> s;
        for (int k = 0; k <= 24; ++k)
            s.push_back({k * 365.0, 0.5});
        for (double v : resample_hydro(s).capacity_factor)
            CHECK(v == 0.5);
    }
    SUBCASE("linear ramp has mean 0.5")
    {
        std::vector<HydroSample> s;
        for (int k = 0; k <= 24; ++k)
            s.push_back({k * 365.0, k / 24.0});
        CHECK(resample_hydro(s, 8760).mean_cf == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("semi-monthly series matches the trapezoid oracle")
    {
        std::vector<HydroSample> s;
        for (int k = 0; k <= 24; ++k)
            s.push_back({k * 365.0, 0.45 + 0.35 * std::sin(2 * 3.14159265358979 * k / 24.0)});
        const auto p = resample_hydro(s);
        double trap = 0.0; // independent trapezoid sum
        for (std::size_t k = 1; k < s.size(); ++k)
            trap += 0.5 * (s[k].value + s[k - 1].value) * (s[k].hour - s[k - 1].hour);
        CHECK(p.mean_cf * 8760.0 == doctest::Approx(trap).epsilon(1e-3));
        CHECK(hydro_trapezoid_energy(s, 8760.0) == doctest::Approx(trap).epsilon(1e-12));
    }
    SUBCASE("gaps above 30 days")
    {
        const std::vector<HydroSample> s{{0, 0.3}, {24.0 * 31, 0.4}};
        CHECK_THROWS_AS(resample_hydro(s), DataQualityError);
    }
    SUBCASE("timestamps must increase")
    {
        const std::vector<HydroSample> s{{0, 0.3}, {0, 0.4}};
        CHECK_THROWS_AS(resample_hydro(s), DataQualityError);
    }
}

TEST_CASE("geothermal")
{
    CHECK(geothermal_profile(0.9).capacity_factor.front() == 0.9);
    CHECK(geothermal_profile(1.0).full_load_hours == 8760.0);
    const auto ceil = geothermal_profile(0.9);
    const std::vector<double> half(8760, 0.5);
    CHECK(dispatch_below_ceiling(ceil, half).full_load_hours == doctest::Approx(4380.0).epsilon(1e-12));
    CHECK_THROWS_AS(geothermal_profile(0.0), ValidationError);

    const auto d = default_techno_economics("geothermal", 2030);
    CHECK(lcoe(d, 0.9 * 8760.0) == doctest::Approx(0.068).epsilon(0.02));
}

TEST_CASE("lcoe")
{
    const auto t = te(1000.0, 0.02, 0.08, 20.0);
    CHECK(annuity_factor(0.08, 20.0) == doctest::Approx(0.101852).epsilon(1e-5));
    CHECK(std::fabs(lcoe(t, 2000.0) - 0.060926) <= 1e-6);
    CHECK(lcoe(te(2000.0, 0.02, 0.08, 20.0), 2000.0) == doctest::Approx(2.0 * lcoe(t, 2000.0)).epsilon(1e-14));
    CHECK_THROWS_AS(lcoe(t, 0.0), UndefinedCostError);
    CHECK_THROWS_AS(te(1000.0, 0.02, 1.2, 20.0).validate(), ValidationError);
    CHECK_THROWS_AS(te(1000.0, 0.02, 0.08, 0.5).validate(), ValidationError);

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto a = te(200 + 3000 * u(rng), 0.005 + 0.05 * u(rng), 0.01 + 0.15 * u(rng), 5 + 30 * u(rng));
        const double aep = 500 + 8000 * u(rng);
        auto b = a;
        b.capex_eur_per_kw *= 1.1;
        auto c = a;
        c.wacc += 0.01;
        CHECK(lcoe(a, aep * 1.05) < lcoe(a, aep));
        CHECK(lcoe(b, aep) > lcoe(a, aep));
        CHECK(lcoe(c, aep) > lcoe(a, aep));
    }
}

TEST_CASE("multi-year means and representative year")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cf(20 * kHoursPerYear);
    for (auto& v : cf)
        v = u(rng) * u(rng);
    const auto p = GenerationProfile::from_series(cf);
    const auto ym = yearly_means(p);
    CHECK(ym.size() == 20);
    CHECK(p.mean_cf == doctest::Approx(compensated_mean(ym)).epsilon(1e-12));
    CHECK(year_slice(p, 3).hours() == kHoursPerYear);

    const std::vector<double> scores{0.30, 0.10, 0.20, 0.40};
    CHECK(representative_year(scores) == 2); // lower median of four
    const std::vector<double> ties{0.2, 0.2, 0.2};
    CHECK(representative_year(ties) == 1);
    CHECK_THROWS_AS(GenerationProfile::from_series({0.5, 1.2}), InputError);
}

TEST_CASE("default techno-economics")
{
    for (const char* c : {"pv", "wind", "hydro", "geothermal", "electrolyzer", "battery_energy", "battery_power"}) {
        const auto a = default_techno_economics(c, 2030), b = default_techno_economics(c, 2050);
        a.validate();
        CHECK(b.capex_eur_per_kw <= a.capex_eur_per_kw);
    }
    CHECK(default_techno_economics("hydro", 2020).capex_eur_per_kw
          == default_techno_economics("hydro", 2050).capex_eur_per_kw);
    CHECK_THROWS_AS(default_techno_economics("pv", 2035), ValidationError);
    CHECK_THROWS_AS(default_techno_economics("coal", 2030), ValidationError);
}
