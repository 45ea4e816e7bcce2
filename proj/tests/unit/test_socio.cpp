#include <doctest.h>

#include <random>

#include "h2atlas/errors.hpp"
#include "h2atlas/socio.hpp"
#include "oracles.hpp"

using namespace h2atlas;
using namespace h2atlas::socio;
using geodata::GridGeometry;
using geodata::RasterGrid;

namespace {

GridGeometry grid(std::size_t cols, std::size_t rows = 1)
{
    GridGeometry g;
    g.n_cols = cols;
    g.n_rows = rows;
    g.origin_lon = 10.0;
    g.origin_lat = -5.0;
    g.cell_size = 0.1;
    return g;
}

SocioInputs uniform_inputs(const GridGeometry& g)
{
    SocioInputs in;
    in.electricity_access = RasterGrid(g, -9999, 0.5);
    in.clean_fuel_access = RasterGrid(g, -9999, 0.5);
    in.population_density = RasterGrid(g, -9999, 50.0);
    in.unemployment_rate = RasterGrid(g, -9999, 0.1);
    in.labor_force_density = RasterGrid(g, -9999, 20.0);
    in.employment_factor = RasterGrid(g, -9999, 5.0);
    in.biomass_dependence = RasterGrid(g, -9999, 0.5);
    in.poverty_headcount = RasterGrid(g, -9999, 0.5);
    return in;
}

} // namespace

TEST_CASE("energy access")
{
    const auto g = grid(3);
    auto in = uniform_inputs(g);
    in.electricity_access[0] = 0.42;
    in.clean_fuel_access[0] = 0.42;
    in.population_density[0] = 110.0;
    in.electricity_access[1] = 1.0;
    in.clean_fuel_access[1] = 1.0;
    in.population_density[1] = 900.0;
    in.population_density[2] = 0.0;
    const auto ae = energy_access_indicator(in);
    CHECK(ae[0] == doctest::Approx(63.8).epsilon(1e-12));
    CHECK(ae[1] == 0.0);
    CHECK(ae[2] == 0.0);

    in.electricity_access[2] = 1.3;
    CHECK_THROWS_AS(energy_access_indicator(in), InputError);
    in.electricity_access[2] = -9999;
    CHECK(energy_access_indicator(in).is_nodata(2));
}

TEST_CASE("macroeconomic effects")
{
    const auto g = grid(2);
    auto in = uniform_inputs(g);
    RasterGrid installable(g, -9999, 40.0);
    installable[1] = 80.0;

    SUBCASE("zero unemployment")
    {
        in.unemployment_rate = RasterGrid(g, -9999, 0.0);
        const auto me = macroeconomic_indicator(in, installable);
        CHECK(me[0] == 0.0);
        CHECK(me[1] == 0.0);
    }
    SUBCASE("linear in labor force density")
    {
        const auto a = macroeconomic_indicator(in, installable);
        for (std::size_t i = 0; i < g.size(); ++i)
            in.labor_force_density[i] *= 2.0;
        const auto b = macroeconomic_indicator(in, installable);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(b[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-14));
        CHECK(a[0] == doctest::Approx(5.0 * 0.1 * 20.0 / 80.0).epsilon(1e-14));
    }
    SUBCASE("Rwanda ranks above Zambia")
    {
        in.employment_factor = RasterGrid(g, -9999, 5.9);
        in.unemployment_rate[0] = 0.128;
        in.labor_force_density[0] = 250.0;
        in.unemployment_rate[1] = 0.05;
        in.labor_force_density[1] = 8.0;
        const auto me = macroeconomic_indicator(in, installable);
        CHECK(me[0] > me[1]);
    }
    SUBCASE("monotone in every factor")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 100; ++k) {
            in.employment_factor[0] = 10 * u(rng);
            in.unemployment_rate[0] = u(rng);
            in.labor_force_density[0] = 300 * u(rng);
            const double base = macroeconomic_indicator(in, installable)[0];
            auto bumped = in;
            bumped.employment_factor[0] += 0.5;
            CHECK(macroeconomic_indicator(bumped, installable)[0] >= base);
            bumped = in;
            bumped.unemployment_rate[0] = std::min(1.0, in.unemployment_rate[0] + 0.05);
            CHECK(macroeconomic_indicator(bumped, installable)[0] >= base);
            bumped = in;
            bumped.labor_force_density[0] += 3.0;
            CHECK(macroeconomic_indicator(bumped, installable)[0] >= base);
        }
    }
    SUBCASE("misaligned installable density")
    {
        CHECK_THROWS_AS(macroeconomic_indicator(in, RasterGrid(grid(3))), AlignmentError);
    }
}

TEST_CASE("other effects")
{
    const auto g = grid(3);
    auto in = uniform_inputs(g);
    in.biomass_dependence[0] = 0.0;
    in.poverty_headcount[0] = 0.0;
    in.biomass_dependence[1] = 1.0;
    in.poverty_headcount[1] = 1.0;
    in.biomass_dependence[2] = 0.4;
    in.poverty_headcount[2] = 0.6;
    const auto oe = other_effects_indicator(in);
    CHECK(oe[0] == 0.0);
    CHECK(oe[1] == 1.0);
    CHECK(oe[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("composite indicator")
{
    const auto g = grid(3);
    RasterGrid ae(g, -9999, 0.0), me(g, -9999, 0.0), oe(g, -9999, 0.0);
    // cell 0 all at max, cell 1 all at min, cell 2 (max, min, min)
    ae[0] = 10;
    me[0] = 3;
    oe[0] = 0.9;
    ae[1] = 1;
    me[1] = 1;
    oe[1] = 0.1;
    ae[2] = 10;
    me[2] = 1;
    oe[2] = 0.1;
    const auto c = composite_indicator(ae, me, oe);
    CHECK(c.score[0] == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(c.score[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(c.score[2] == doctest::Approx(100.0 / 3.0).epsilon(1e-3));
    CHECK(c.warnings.empty());

    SUBCASE("scale invariance")
    {
        auto ae2 = ae;
        for (std::size_t i = 0; i < g.size(); ++i)
            ae2[i] *= 37.5;
        const auto c2 = composite_indicator(ae2, me, oe);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(c2.score[i] == doctest::Approx(c.score[i]).epsilon(1e-12));
    }
    SUBCASE("constant layer")
    {
        const auto c3 = composite_indicator(ae, RasterGrid(g, -9999, 4.0), oe);
        CHECK_FALSE(c3.warnings.empty());
        CHECK(c3.score[1] == doctest::Approx(50.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("random layers stay in range")
    {
        const auto gg = grid(20, 20);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RasterGrid a(gg, -9999, 0), m(gg, -9999, 0), o(gg, -9999, 0);
        for (std::size_t i = 0; i < gg.size(); ++i) {
            a[i] = 500 * u(rng);
            m[i] = u(rng);
            o[i] = u(rng);
        }
        const auto r = composite_indicator(a, m, o, {2.0, 1.0, 0.5});
        for (std::size_t i = 0; i < gg.size(); ++i) {
            CHECK(r.score[i] >= 0.0);
            CHECK(r.score[i] <= 100.0);
        }
    }
}

TEST_CASE("regional statistics")
{
    SUBCASE("quantiles equal the sort oracle")
    {
        std::mt19937_64 rng(1000);
        std::lognormal_distribution<double> d(3.0, 1.0);
        std::vector<double> v(1000);
        for (auto& x : v)
            x = d(rng);
        auto s = v;
        std::sort(s.begin(), s.end());
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0, 0.1234})
            CHECK(quantile_sorted(s, q) == testsupport::sort_quantile(v, q));
    }
    SUBCASE("two countries over a raster")
    {
        const auto g = grid(10, 10);
        RasterGrid ind(g, -9999, 0.0);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 100.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            ind[i] = u(rng);
        ind[7] = -9999;
        std::vector<std::size_t> a, b;
        for (std::size_t i = 0; i < g.size(); ++i)
            (i % 10 < 4 ? a : b).push_back(i);
        const std::vector<geodata::Region> regions{geodata::make_region("ZZB.1_1", "ZZB", g, b),
                                                   geodata::make_region("ZZA.1_1", "ZZA", g, a)};
        const auto st = regional_stats(ind, regions);
        REQUIRE(st.size() == 2);
        CHECK(st[0].country == "ZZA");
        std::vector<double> va;
        for (auto i : a)
            if (!ind.is_nodata(i))
                va.push_back(ind[i]);
        CHECK(st[0].cells == va.size());
        CHECK(st[0].median == testsupport::sort_quantile(va, 0.5));
        CHECK(st[0].q25 == testsupport::sort_quantile(va, 0.25));
        for (const auto& s : st) {
            CHECK(s.q25 <= s.median);
            CHECK(s.median <= s.q75);
            CHECK(s.iqr == s.q75 - s.q25);
        }
    }
    SUBCASE("single cell")
    {
        const auto g = grid(2);
        RasterGrid ind(g, -9999, 7.5);
        const std::vector<geodata::Region> regions{geodata::make_region("ZZA.1_1", "ZZA", g, {1})};
        const auto st = regional_stats(ind, regions);
        REQUIRE(st.size() == 1);
        CHECK(st[0].median == 7.5);
        CHECK(st[0].q25 == 7.5);
        CHECK(st[0].q75 == 7.5);
        CHECK(st[0].iqr == 0.0);
    }
    SUBCASE("country broadcast")
    {
        const auto g = grid(4);
        const std::vector<geodata::Region> regions{geodata::make_region("ZZA.1_1", "ZZA", g, {0, 1}),
                                                   geodata::make_region("ZZB.1_1", "ZZB", g, {2})};
        const auto r = broadcast_country_values(g, regions, {{"ZZA", 0.128}});
        CHECK(r[0] == 0.128);
        CHECK(r[1] == 0.128);
        CHECK(r.is_nodata(2));
        CHECK(r.is_nodata(3));
    }
}
