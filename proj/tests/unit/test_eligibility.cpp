#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "h2atlas/eligibility.hpp"
#include "h2atlas/errors.hpp"
#include "oracles.hpp"

using namespace h2atlas;
using namespace h2atlas::eligibility;
using geodata::GridGeometry;
using geodata::MaskGrid;

namespace {

GridGeometry equator_grid(std::size_t n, double cs = 0.01)
{
    GridGeometry g;
    g.n_cols = n;
    g.n_rows = n;
    g.origin_lon = 0.0;
    g.origin_lat = -0.5 * cs * static_cast<double>(n);
    g.cell_size = cs;
    return g;
}

geodata::Region whole(const GridGeometry& g)
{
    std::vector<std::size_t> cells(g.size());
    std::iota(cells.begin(), cells.end(), 0);
    return geodata::make_region("R.1_1", "XAA", g, cells);
}

Criterion point_criterion(const GridGeometry& g, std::size_t r, std::size_t c, double buffer, std::string name = "pt")
{
    Criterion k;
    k.name = std::move(name);
    k.feature = MaskGrid(g);
    k.feature.set(r, c, true);
    k.buffer_m = buffer;
    return k;
}

Criterion random_criterion(const GridGeometry& g, std::mt19937_64& rng, const std::string& name)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Criterion k;
    k.name = name;
    k.feature = MaskGrid(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        k.feature.set(i, u(rng) < 0.01);
    k.buffer_m = 3000.0 * u(rng);
    return k;
}

} // namespace

TEST_CASE("apply_criterion")
{
    const auto g = equator_grid(41);
    SUBCASE("zero buffer excludes exactly the feature cell")
    {
        const auto k = point_criterion(g, 20, 20, 0.0);
        const auto ex = apply_criterion(k, geodata::distance_to_feature(k.feature));
        CHECK(ex.count() == 1);
        CHECK(ex.at(20, 20));
    }
    SUBCASE("1500 m disc at the equator matches the brute-force disc")
    {
        const auto k = point_criterion(g, 20, 20, 1500.0);
        const auto ex = apply_criterion(k, geodata::distance_to_feature(k.feature));
        const testsupport::OracleGrid og{g.n_cols, g.n_rows, g.origin_lat, g.cell_size};
        std::size_t n = 0;
        for (std::size_t r = 0; r < g.n_rows; ++r)
            for (std::size_t c = 0; c < g.n_cols; ++c) {
                const bool inside = testsupport::oracle_distance_m(og, r, c, 20, 20) < 1500.0;
                CHECK(ex.at(r, c) == inside);
                n += inside;
            }
        CHECK(n > 1);
    }
    SUBCASE("infinite buffer is rejected")
    {
        const auto k = point_criterion(g, 1, 1, std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(apply_criterion(k, geodata::distance_to_feature(k.feature)), ValidationError);
        CHECK_THROWS_AS(point_criterion(g, 1, 1, -1.0).validate(), ValidationError);
    }
    SUBCASE("misaligned distance field")
    {
        const auto k = point_criterion(g, 1, 1, 10.0);
        CHECK_THROWS_AS(apply_criterion(k, geodata::RasterGrid(equator_grid(40))), AlignmentError);
    }
}

TEST_CASE("combine_exclusions")
{
    const auto g = equator_grid(30, 0.02);
    const auto region = whole(g);
    SUBCASE("no criteria leaves everything eligible")
    {
        const auto r = combine_exclusions({}, region);
        CHECK(r.eligible_share == 1.0);
    }
    SUBCASE("a criterion excluding everything")
    {
        Criterion all;
        all.name = "all";
        all.feature = MaskGrid(g, true);
        const std::vector<Criterion> ks{all};
        const auto r = combine_exclusions(ks, region);
        CHECK(r.eligible_share == 0.0);
        CHECK(r.per_criterion_excluded_share.at("all") == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("empty region is a contract violation")
    {
        geodata::Region empty = region;
        empty.mask.clear();
        CHECK_THROWS_AS(combine_exclusions({}, empty), ContractViolation);
    }
    SUBCASE("duplicate names within a technology")
    {
        const std::vector<Criterion> ks{point_criterion(g, 1, 1, 0, "a"), point_criterion(g, 2, 2, 0, "a")};
        CHECK_THROWS_AS(combine_exclusions(ks, region), ValidationError);
    }
}

TEST_CASE("50x50 region with three random criteria equals the per-cell oracle")
{
    std::mt19937_64 rng(50);
    GridGeometry g;
    g.n_cols = g.n_rows = 50;
    g.origin_lon = 5.0;
    g.origin_lat = 12.0;
    g.cell_size = 0.01;
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < g.size(); ++i)
        if ((i / 50 - 25) * (i / 50 - 25) + (i % 50 - 25) * (i % 50 - 25) < 500)
            cells.push_back(i);
    const auto region = geodata::make_region("R.1_1", "XAA", g, cells);
    std::vector<Criterion> ks;
    for (int k = 0; k < 3; ++k)
        ks.push_back(random_criterion(g, rng, "c" + std::to_string(k)));
    const auto r = combine_exclusions(ks, region);

    const testsupport::OracleGrid og{g.n_cols, g.n_rows, g.origin_lat, g.cell_size};
    std::vector<std::uint8_t> in_region(g.size(), 0);
    for (auto i : cells)
        in_region[i] = 1;
    std::vector<testsupport::OracleCriterion> oks;
    for (const auto& k : ks)
        oks.push_back({std::vector<std::uint8_t>(k.feature.cells().begin(), k.feature.cells().end()), k.buffer_m});
    const auto oracle = testsupport::brute_force_eligibility(og, in_region, oks);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(r.eligible[i] == (oracle[i] != 0));

    SUBCASE("result invariants")
    {
        double sum = 0.0;
        for (const auto& [n, s] : r.per_criterion_excluded_share)
            sum += s;
        CHECK(r.eligible_share >= 0.0);
        CHECK(r.eligible_share <= 1.0);
        CHECK(r.eligible_share >= 1.0 - sum - 1e-12);
        CHECK(r.eligible_area_km2 == doctest::Approx(r.eligible_share * region.area_km2).epsilon(5e-3));
    }
    SUBCASE("order independence")
    {
        std::vector<Criterion> rev(ks.rbegin(), ks.rend());
        const auto r2 = combine_exclusions(rev, region);
        CHECK(r2.eligible == r.eligible);
        CHECK(r2.per_criterion_excluded_share == r.per_criterion_excluded_share);
    }
    SUBCASE("adding a criterion never increases eligibility")
    {
        auto more = ks;
        more.push_back(random_criterion(g, rng, "extra"));
        CHECK(combine_exclusions(more, region).eligible_share <= r.eligible_share);
    }
    SUBCASE("larger buffers never shrink a criterion's share")
    {
        auto k = ks[0];
        double prev = -1.0;
        for (double b : {0.0, 500.0, 1200.0, 2500.0, 4000.0}) {
            k.buffer_m = b;
            const std::vector<Criterion> one{k};
            const double s = combine_exclusions(one, region).per_criterion_excluded_share.at(k.name);
            CHECK(s >= prev);
            prev = s;
        }
    }
}

TEST_CASE("place_capacity")
{
    const auto g = equator_grid(20, 0.05);
    const auto region = whole(g);
    const std::vector<Criterion> ks{point_criterion(g, 3, 4, 8000.0)};
    const auto r = combine_exclusions(ks, region);
    const auto p = place_capacity(r, Technology::pv, 50.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!r.eligible[i])
            CHECK(p.capacity_mw_per_cell[i] == 0.0);
        sum += p.capacity_mw_per_cell[i];
    }
    CHECK(p.total_capacity_mw == doctest::Approx(sum).epsilon(1e-6));
    CHECK(p.total_capacity_mw == doctest::Approx(50.0 * r.eligible_area_km2).epsilon(1e-6));

    const auto p2 = place_capacity(r, Technology::pv, 100.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(p2.capacity_mw_per_cell[i] == doctest::Approx(2.0 * p.capacity_mw_per_cell[i]).epsilon(1e-15));

    Criterion all;
    all.name = "all";
    all.feature = MaskGrid(g, true);
    const std::vector<Criterion> none{all};
    CHECK(place_capacity(combine_exclusions(none, region), Technology::wind, 7.5).total_capacity_mw == 0.0);
    CHECK_THROWS_AS(place_capacity(r, Technology::pv, 0.0), ValidationError);
}

TEST_CASE("Niger onshore wind at the back-computed density")
{
    // 4618 GW / 573744 km²
    const double density = 4618e3 / 573744.0;
    CHECK(density == doctest::Approx(8.05).epsilon(1e-3));
    CHECK(573744.0 * 8.05 / 1e3 == doctest::Approx(4618.0).epsilon(1e-3));
}

TEST_CASE("default densities")
{
    CHECK(default_density(Technology::pv) == 50.0);
    CHECK(default_density(Technology::wind) == 7.5);
    CHECK(default_density(Technology::geothermal) == 5.0);
    CHECK_THROWS_AS(default_density(Technology::hydro), ValidationError);
}
