#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "h2atlas/errors.hpp"
#include "h2atlas/water.hpp"

using namespace h2atlas;
using namespace h2atlas::water;
using geodata::GridGeometry;
using geodata::RasterGrid;

namespace {

GridGeometry grid(std::size_t cols, std::size_t rows, double lat = 0.0, double cs = 0.1)
{
    GridGeometry g;
    g.n_cols = cols;
    g.n_rows = rows;
    g.origin_lon = 0.0;
    g.origin_lat = lat;
    g.cell_size = cs;
    return g;
}

geodata::Region all_cells(const GridGeometry& g)
{
    std::vector<std::size_t> c(g.size());
    std::iota(c.begin(), c.end(), 0);
    return geodata::make_region("W.1_1", "XAA", g, c);
}

double sy1(YieldLevel l, double recharge, double consumption)
{
    const auto g = grid(1, 1);
    return sustainable_yield(RasterGrid(g, -9999, recharge), RasterGrid(g, -9999, consumption),
                             YieldScenario::make(l, Climate::rcp26, 2020))[0];
}

} // namespace

TEST_CASE("scenario definitions")
{
    CHECK(supplementary_share(YieldLevel::conservative) == 0.10);
    CHECK(supplementary_share(YieldLevel::medium) == 0.40);
    CHECK(supplementary_share(YieldLevel::extreme) == 0.70);
    CHECK(YieldScenario::make(YieldLevel::medium, Climate::rcp85, 2030).averaging_window() == std::pair(2015, 2045));
    CHECK(YieldScenario::make(YieldLevel::medium, Climate::rcp85, 2050).averaging_window() == std::pair(2036, 2065));
    CHECK(YieldScenario::make(YieldLevel::medium, Climate::rcp85, 2020).averaging_window() == std::pair(2015, 2035));
    YieldScenario bad{YieldLevel::medium, 0.5, Climate::rcp26, 2020};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(YieldScenario::make(YieldLevel::medium, Climate::rcp26, 2040), ValidationError);
    CHECK_THROWS_AS(yield_level_from_string("wild"), ValidationError);
}

TEST_CASE("sustainable yield")
{
    SUBCASE("Angola 2020 RCP2.6 rows")
    {
        CHECK(sy1(YieldLevel::conservative, 303.3, 0.53) == doctest::Approx(29.8).epsilon(0.15 / 29.8));
        CHECK(sy1(YieldLevel::medium, 303.3, 0.53) == doctest::Approx(120.8).epsilon(0.15 / 120.8));
        CHECK(sy1(YieldLevel::extreme, 303.3, 0.53) == doctest::Approx(211.9).epsilon(0.15 / 211.9));
    }
    SUBCASE("no recharge and clamping")
    {
        for (auto l : {YieldLevel::conservative, YieldLevel::medium, YieldLevel::extreme}) {
            CHECK(sy1(l, 0.0, 0.0) == 0.0);
            CHECK(sy1(l, 100.0, 75.0) == 0.0);
        }
    }
    SUBCASE("equal spacing when unclamped")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 500; ++i) {
            const double r = 500 * u(rng), c = 0.1 * r * u(rng);
            const double a = sy1(YieldLevel::conservative, r, c), b = sy1(YieldLevel::medium, r, c),
                         e = sy1(YieldLevel::extreme, r, c);
            CHECK(std::fabs((e - b) - (b - a)) <= 1e-12 * r + 1e-12);
        }
    }
    SUBCASE("nodata and misalignment")
    {
        const auto g = grid(2, 1);
        RasterGrid r(g, -9999, 10.0), c(g, -9999, 0.0);
        r[1] = -9999;
        const auto s = sustainable_yield(r, c, YieldScenario::make(YieldLevel::medium, Climate::rcp26, 2030));
        CHECK(s.is_nodata(1));
        CHECK_THROWS_AS(sustainable_yield(r, RasterGrid(grid(3, 1)), YieldScenario::make(YieldLevel::medium, Climate::rcp26, 2030)),
                        AlignmentError);
        RasterGrid neg(g, -9999, -1.0);
        CHECK_THROWS_AS(sustainable_yield(neg, c, YieldScenario::make(YieldLevel::medium, Climate::rcp26, 2030)),
                        InputError);
    }
}

TEST_CASE("region water budget")
{
    SUBCASE("34.9 mm over 1 km2")
    {
        // 1 km x 1 km at the equator: 1000/111320 deg wide is not square in
        // rows, so use the model's area directly
        const auto g = grid(1, 1, -0.0045, 0.009);
        const auto region = all_cells(g);
        const auto b = region_water_budget(RasterGrid(g, -9999, 34.9), region);
        CHECK(b.volume_m3_per_year == doctest::Approx(34.9e-3 * region.area_km2 * 1e6).epsilon(1e-12));
        CHECK(34.9e-3 * 1e6 == doctest::Approx(34900.0));
    }
    SUBCASE("West-Africa style raster averaging 34.9 mm")
    {
        // latitude-dependent cell areas: build values so the area-weighted mean is 34.9
        const auto g = grid(30, 20, 4.0, 0.5);
        RasterGrid sy(g, -9999, 0.0);
        std::mt19937_64 rng(34);
        std::uniform_real_distribution<double> u(0.0, 70.0);
        double vol = 0.0, area = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            sy[i] = u(rng);
            const double a = geodata::cell_area_km2(g, i);
            vol += sy[i] * a;
            area += a;
        }
        const double shift = 34.9 - vol / area;
        for (std::size_t i = 0; i < g.size(); ++i)
            sy[i] += shift;
        const auto b = region_water_budget(sy, all_cells(g));
        CHECK(std::fabs(b.mean_mm_per_year - 34.9) <= 1e-9);
    }
    SUBCASE("random raster equals the per-cell sum")
    {
        const auto g = grid(17, 13, -12.0, 0.2);
        RasterGrid sy(g, -9999, 0.0);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 200.0);
        long double oracle = 0.0;
        std::size_t skipped = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i % 11 == 0) {
                sy[i] = -9999;
                ++skipped;
                continue;
            }
            sy[i] = u(rng);
            const long double lat = -12.0L + (13 - i / 17 - 0.5L) * 0.2L;
            const long double a = 111320.0L * std::cos(lat * 3.14159265358979323846L / 180.0L) * 0.2L * 110540.0L * 0.2L;
            oracle += sy[i] * 1e-3L * a;
        }
        const auto b = region_water_budget(sy, all_cells(g));
        CHECK(b.volume_m3_per_year == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
        CHECK(b.nodata_cells == skipped);
    }
}

TEST_CASE("desalination and transport")
{
    CHECK(desal_transport_cost(0.0, 0.0, 0.05) == doctest::Approx(0.70).epsilon(1e-12));
    // 0.05 * 1000*9.81*300 / (3.6e6*0.75)
    CHECK(0.05 * lift_energy_kwh_per_m3(300.0) == doctest::Approx(0.0545).epsilon(1e-3));
    CHECK(lift_energy_kwh_per_m3(-50.0) == 0.0);
    CHECK(desal_transport_cost(1500.0, 300.0, 0.05) == doctest::Approx(2.50).epsilon(0.1));

    double prev = 0.0;
    for (double d : {0.0, 10.0, 200.0, 900.0}) {
        const double c = desal_transport_cost(d, 100.0, 0.05);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(desal_transport_cost(100.0, 400.0, 0.05) >= desal_transport_cost(100.0, 200.0, 0.05));
    CHECK(desal_transport_cost(100.0, 200.0, 0.08) >= desal_transport_cost(100.0, 200.0, 0.05));
}

TEST_CASE("supply curve")
{
    SUBCASE("two-segment arithmetic")
    {
        const auto opts = supply_curve(0.30, 1e6, 1.10);
        const auto d = draw_water(opts, 1.5e6);
        CHECK(d.cost_eur == doctest::Approx(1e6 * 0.30 + 0.5e6 * 1.10).epsilon(1e-12));
        CHECK(d.groundwater_m3 == 1e6);
    }
    SUBCASE("empty aquifer")
    {
        const auto d = draw_water(supply_curve(0.30, 0.0, 1.10), 5e5);
        CHECK(d.desalination_m3 == 5e5);
        CHECK(d.groundwater_m3 == 0.0);
    }
    SUBCASE("groundwater dearer than desalination")
    {
        const auto opts = supply_curve(2.0, 1e6, 1.10);
        CHECK(opts.front().kind == SupplyKind::desalination);
        CHECK(draw_water(opts, 10.0).desalination_m3 == 10.0);
    }
    SUBCASE("blended cost never falls with volume")
    {
        const auto opts = supply_curve(0.30, 1e6, 1.10);
        double prev = 0.0;
        for (double v = 1e5; v < 5e6; v *= 1.5) {
            const double b = draw_water(opts, v).blended_eur_per_m3();
            CHECK(b >= prev);
            prev = b;
        }
        CHECK(groundwater_cap(opts) == 1e6);
    }
    SUBCASE("capped curve without desalination")
    {
        const std::vector<WaterSupplyOption> only{{SupplyKind::groundwater, 10.0, 0.2}};
        CHECK_THROWS_AS(draw_water(only, 11.0), InfeasibleError);
    }
}
