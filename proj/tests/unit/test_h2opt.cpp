#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "h2atlas/errors.hpp"
#include "h2atlas/h2opt.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace h2atlas;
using namespace h2atlas::h2opt;
using testsupport::make_system;
using testsupport::technology;

namespace {

// capex * (annuity + opex share), EUR/kW/a
double annual_per_kw(const res_sim::TechnoEconomics& e)
{
    const double q = std::pow(1.0 + e.wacc, -e.lifetime_years);
    return e.capex_eur_per_kw * (e.wacc / (1.0 - q) + e.opex_share_per_year);
}

std::vector<double> short_series(std::size_t hours, std::uint64_t seed, bool solar)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cf(hours);
    double w = 0.5;
    for (std::size_t t = 0; t < hours; ++t) {
        if (solar) {
            const double h = static_cast<double>(t % 24);
            cf[t] = h > 6 && h < 18 ? std::sin((h - 6) / 12 * 3.14159265358979) * (0.6 + 0.3 * u(rng)) : 0.0;
        } else {
            w = std::clamp(0.85 * w + 0.15 * u(rng) + 0.05 * (u(rng) - 0.5), 0.0, 1.0);
            cf[t] = w;
        }
    }
    return cf;
}

RegionSystemInputs two_tech_year(std::uint64_t seed, bool battery)
{
    testsupport::SiteClimate c;
    const auto w = testsupport::make_weather(c, 1, seed);
    auto techs = testsupport::resource_classes(w, Technology::pv, {1.0}, 800.0);
    auto wind = testsupport::resource_classes(w, Technology::wind, {1.0}, 400.0);
    techs.insert(techs.end(), wind.begin(), wind.end());
    return make_system(std::move(techs), 2030, battery);
}

double relative_balance_error(const SystemDesign& d)
{
    return std::fabs(d.generation_mwh - d.electrolyzer_input_mwh - d.curtailed_mwh - d.battery_loss_mwh)
        / d.generation_mwh;
}

} // namespace

TEST_CASE("maximum hydrogen potential")
{
    auto in = make_system({technology(Technology::wind, 100.0, std::vector<double>(8760, 0.25))});
    in.efficiency_kwh_per_kg = kLhvKwhPerKg / 0.7;
    CHECK(max_h2_potential_twh(in) * 1e3 == doctest::Approx(100 * 0.25 * 8760 * 0.7 / 1e3).epsilon(1e-12));
    CHECK(max_h2_potential_twh(in) * 1e3 == doctest::Approx(153.3).epsilon(1e-3));
    CHECK(max_h2_potential_kg(in) == doctest::Approx(100 * 0.25 * 8760 * 1e3 / in.efficiency_kwh_per_kg).epsilon(1e-12));

    in.technologies.front().ceiling_mw = 0.0;
    CHECK(max_h2_potential_twh(in) == 0.0);
    CHECK_THROWS_AS(cost_potential_curve(in), InfeasibleError);
}

TEST_CASE("efficiency defaults")
{
    CHECK(default_electrolyzer_efficiency(2020) == 50.0);
    CHECK(default_electrolyzer_efficiency(2030) == 48.0);
    CHECK(default_electrolyzer_efficiency(2050) == 44.0);
    CHECK_THROWS_AS(default_electrolyzer_efficiency(2031), ValidationError);
    auto in = make_system({technology(Technology::pv, 1.0, std::vector<double>(8760, 0.2))});
    in.efficiency_kwh_per_kg = 30.0;
    CHECK_THROWS_AS(in.validate(), ValidationError);
}

TEST_CASE("flat single technology closed form")
{
    auto in = make_system({technology(Technology::wind, 10.0, std::vector<double>(8760, 1.0))});
    const double target_kg = 4000.0 * 1000.0 / in.efficiency_kwh_per_kg;
    const auto d = optimize_system(in, target_kg);
    const double g = 4000.0 / 8760.0;
    CHECK(d.capacity_mw.at(Technology::wind) == doctest::Approx(g).epsilon(1e-6));
    CHECK(g == doctest::Approx(0.457).epsilon(1e-3));
    CHECK(d.electrolyzer_mw == doctest::Approx(g).epsilon(1e-6));
    CHECK(d.electrolyzer_flh == doctest::Approx(8760.0).epsilon(1e-6));
    CHECK(d.battery_mwh == 0.0);
    CHECK(d.curtailed_mwh == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    const double cost = g * 1000.0 * (annual_per_kw(in.technologies.front().economics) + annual_per_kw(in.electrolyzer));
    CHECK(d.system_cost_eur == doctest::Approx(cost).epsilon(1e-6));
    CHECK(d.lcoh_eur_per_kg == doctest::Approx(cost / target_kg).epsilon(1e-6));

    SUBCASE("single 25% step equals the oracle")
    {
        in.technologies.front().ceiling_mw = 4.0 * g;
        const std::vector<double> steps{0.25};
        const auto c = cost_potential_curve(in, steps);
        REQUIRE(c.points.size() == 1);
        CHECK(c.points[0].lcoh_eur_per_kg == doctest::Approx(cost / target_kg).epsilon(1e-6));
    }
    SUBCASE("infeasible target")
    {
        CHECK_THROWS_AS(optimize_system(in, 1e3 * target_kg), InfeasibleError);
        CHECK_THROWS_AS(optimize_system(in, 0.0), ContractViolation);
    }
}

TEST_CASE("reference LP agrees on short horizons")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const std::size_t hours = 24 * 7;
        auto in = make_system({technology(Technology::pv, 50.0, short_series(hours, seed, true)),
                               technology(Technology::wind, 50.0, short_series(hours, seed + 10, false))});
        const double target = 0.3 * max_h2_potential_kg(in);
        const auto a = optimize_system(in, target);
        const auto b = optimize_system_reference_lp(in, target);
        CHECK(a.total_cost_eur() == doctest::Approx(b.total_cost_eur()).epsilon(1e-4));
        CHECK(a.annual_h2_kg == doctest::Approx(target).epsilon(1e-6));
        CHECK(relative_balance_error(a) <= 1e-6);
        CHECK(relative_balance_error(b) <= 1e-6);
    }
}

TEST_CASE("cost dominance over random battery-free designs")
{
    const auto in = two_tech_year(5, false);
    const double target_kg = 0.25 * max_h2_potential_kg(in);
    const double target_mwh = target_kg * in.efficiency_kwh_per_kg / 1000.0;
    const auto d = optimize_system(in, target_kg);
    CHECK(relative_balance_error(d) <= 1e-6);
    CHECK(d.annual_h2_kg == doctest::Approx(target_kg).epsilon(1e-6));

    std::vector<testsupport::GreedyTech> techs;
    for (const auto& t : in.technologies)
        techs.push_back({t.profile.capacity_factor, t.ceiling_mw, 1000.0 * annual_per_kw(t.economics)});
    const double elz = 1000.0 * annual_per_kw(in.electrolyzer);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tried = 0;
    while (tried < 100) {
        std::vector<double> x{u(rng) * techs[0].ceiling_mw, u(rng) * techs[1].ceiling_mw};
        const double e = testsupport::min_electrolyzer_mw(techs, x, target_mwh);
        if (e < 0.0)
            continue;
        ++tried;
        const double cost = x[0] * techs[0].annual_cost_per_mw + x[1] * techs[1].annual_cost_per_mw + e * elz;
        CHECK(d.system_cost_eur <= cost * (1.0 + 1e-9));
    }

    SUBCASE("battery-free cost equals the greedy arithmetic")
    {
        const std::vector<double> x{d.capacity_mw.at(Technology::pv), d.capacity_mw.at(Technology::wind)};
        const double input = testsupport::greedy_input_mwh(techs, x, d.electrolyzer_mw);
        CHECK(input == doctest::Approx(target_mwh).epsilon(1e-6));
        CHECK(d.system_cost_eur
              == doctest::Approx(x[0] * techs[0].annual_cost_per_mw + x[1] * techs[1].annual_cost_per_mw
                                 + d.electrolyzer_mw * elz)
                     .epsilon(1e-9));
        CHECK(annual_capacity_cost(in, d.capacity_mw, d.electrolyzer_mw) == doctest::Approx(d.system_cost_eur).epsilon(1e-9));
    }
}

TEST_CASE("annual_capacity_cost rejects technologies that are not offered")
{
    const auto in = make_system({technology(Technology::pv, 10.0, std::vector<double>(8760, 0.2))});
    CHECK_THROWS_AS(annual_capacity_cost(in, {{Technology::wind, 1.0}}, 0.0), ContractViolation);
    CHECK(annual_capacity_cost(in, {{Technology::wind, 0.0}}, 0.0) == 0.0);
}

TEST_CASE("cost-potential curve")
{
    const auto in = two_tech_year(8, true);
    const std::vector<double> steps{0.05, 0.25, 0.5, 1.0};
    const auto c = cost_potential_curve(in, steps);
    REQUIRE(c.points.size() == steps.size());
    for (std::size_t k = 1; k < c.points.size(); ++k) {
        CHECK(c.points[k].h2_twh > c.points[k - 1].h2_twh);
        CHECK(c.points[k].lcoh_eur_per_kg >= c.points[k - 1].lcoh_eur_per_kg * (1.0 - 1e-9));
    }
    for (const auto& p : c.points) {
        CHECK(relative_balance_error(p.design) <= 1e-6);
        CHECK(p.design.battery_mwh == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
        for (const auto& t : in.technologies)
            CHECK(p.design.capacity_mw.at(t.technology) <= t.ceiling_mw * (1.0 + 1e-9));
    }

    SUBCASE("later years are not dearer")
    {
        testsupport::SiteClimate cl;
        const auto w = testsupport::make_weather(cl, 1, 8);
        auto techs = testsupport::resource_classes(w, Technology::pv, {1.0}, 800.0, 2050);
        auto wind = testsupport::resource_classes(w, Technology::wind, {1.0}, 400.0, 2050);
        techs.insert(techs.end(), wind.begin(), wind.end());
        const auto late = cost_potential_curve(make_system(std::move(techs), 2050, true), steps);
        for (std::size_t k = 0; k < steps.size(); ++k)
            CHECK(late.points[k].lcoh_eur_per_kg <= c.points[k].lcoh_eur_per_kg);
    }
    SUBCASE("step validation")
    {
        const std::vector<double> bad{1.5};
        CHECK_THROWS_WITH_AS(cost_potential_curve(in, bad), "steps must lie in (0,1]", ValidationError);
        const std::vector<double> unsorted{0.5, 0.25};
        CHECK_THROWS_AS(cost_potential_curve(in, unsorted), ValidationError);
    }
}

TEST_CASE("groundwater feasible share")
{
    auto in = two_tech_year(11, false);
    const std::vector<double> steps{0.25, 1.0};
    SUBCASE("no groundwater")
    {
        in.water = water::supply_curve(0.1, 0.0, 2.5);
        const auto r = groundwater_feasible_share(cost_potential_curve(in, steps), in);
        CHECK(r.feasible_share == 0.0);
        for (const auto& s : r.steps) {
            CHECK(s.desalination_m3 == doctest::Approx(s.water_m3));
            CHECK(s.water_m3 == doctest::Approx(s.step * max_h2_potential_kg(in) * 10.0 / 1000.0).epsilon(1e-6));
        }
    }
    SUBCASE("ample groundwater")
    {
        in.water = water::supply_curve(0.1, 1e12, 2.5);
        CHECK(groundwater_feasible_share(cost_potential_curve(in, steps), in).feasible_share == 1.0);
    }
    SUBCASE("cap between the steps")
    {
        const double w25 = 0.25 * max_h2_potential_kg(in) * 10.0 / 1000.0;
        in.water = water::supply_curve(0.1, 2.0 * w25, 2.5);
        CHECK(groundwater_feasible_share(cost_potential_curve(in, steps), in).feasible_share == 0.25);
    }
    SUBCASE("water curve required")
    {
        in.water.clear();
        CHECK_THROWS_AS(groundwater_feasible_share(cost_potential_curve(in, steps), in), ContractViolation);
    }
}

TEST_CASE("demand set-aside")
{
    NationalCurve n;
    n.country = "XAA";
    n.steps = {1.0};
    n.segments = {{"A", 0.25, 40.0, 2.0}, {"B", 0.25, 35.0, 2.5}, {"A", 0.5, 25.0, 3.0}};
    SUBCASE("worked example")
    {
        const auto r = demand_set_aside(n, {33.0, true, 19.0}, 48.0);
        CHECK(r.reserved_share == doctest::Approx(0.52).epsilon(1e-12));
        CHECK_FALSE(r.over_demand);
        CHECK(r.exportable.total_twh() == doctest::Approx(48.0).epsilon(1e-12));
        CHECK(r.exportable.segments.front().lcoh_eur_per_kg == 2.5); // cheapest 52 TWh gone
        CHECK(r.exportable.segments.front().h2_twh == doctest::Approx(23.0).epsilon(1e-12));
    }
    SUBCASE("electricity demand converted to hydrogen")
    {
        CHECK(reserved_h2_twh({48.0, false, 0.0}, 48.0) == doctest::Approx(33.33).epsilon(1e-12));
    }
    SUBCASE("Guinea over-demand")
    {
        NationalCurve g;
        g.segments = {{"GIN.1_1", 1.0, 25.0, 2.1}};
        const auto r = demand_set_aside(g, {33.0, true, 3.2}, 48.0);
        CHECK(r.over_demand);
        CHECK(r.reserved_share * 100 == doctest::Approx(144.8).epsilon(1e-3));
        CHECK(std::fabs(r.reserved_share * 100 - 144.5) <= 2.0);
        CHECK(r.exportable.segments.empty());
    }
    SUBCASE("zero demand")
    {
        const auto r = demand_set_aside(n, {}, 48.0);
        CHECK(r.reserved_twh == 0.0);
        CHECK(r.exportable.total_twh() == n.total_twh());
        CHECK(r.exportable.segments.size() == n.segments.size());
    }
    CHECK_THROWS_AS(reserved_h2_twh({-1.0, false, 0.0}, 48.0), ValidationError);
}

TEST_CASE("national aggregation")
{
    auto curve = [](std::string id, std::vector<std::pair<double, double>> pts) {
        CostPotentialCurve c;
        c.region_id = std::move(id);
        const std::vector<double> steps{0.25, 0.5, 1.0};
        for (std::size_t k = 0; k < pts.size(); ++k) {
            CurvePoint p;
            p.step = steps[k];
            p.h2_twh = pts[k].first;
            p.lcoh_eur_per_kg = pts[k].second;
            c.points.push_back(p);
        }
        return c;
    };
    SUBCASE("equal potentials average")
    {
        const std::vector<CostPotentialCurve> rs{curve("A", {{1, 2.0}, {2, 2.0}, {4, 2.0}}),
                                                 curve("B", {{1, 3.0}, {2, 3.0}, {4, 3.0}})};
        const auto n = aggregate_national("XAA", rs);
        for (double m : n.weighted_mean_lcoh)
            CHECK(m == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(n.total_twh() == doctest::Approx(8.0));
    }
    SUBCASE("one region is the identity")
    {
        const std::vector<CostPotentialCurve> rs{curve("A", {{1, 2.0}, {2, 2.1}, {4, 2.4}})};
        const auto n = aggregate_national("XAA", rs);
        REQUIRE(n.segments.size() == 3);
        CHECK(n.segments[2].h2_twh == 2.0);
        CHECK(n.weighted_mean_lcoh == std::vector<double>{2.0, 2.1, 2.4});
    }
    SUBCASE("three regions match a pooled sort")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<CostPotentialCurve> rs;
        std::vector<std::tuple<double, std::string, double, double>> pool; // lcoh, id, step, qty
        for (const char* id : {"C", "A", "B"}) {
            double q = 0, l = 1.5 + u(rng);
            std::vector<std::pair<double, double>> pts;
            for (double s : {0.25, 0.5, 1.0}) {
                const double dq = 1 + 10 * u(rng);
                q += dq;
                l += std::floor(4 * u(rng)) * 0.25; // ties are likely
                pts.push_back({q, l});
                pool.emplace_back(l, id, s, dq);
            }
            rs.push_back(curve(id, pts));
        }
        std::sort(pool.begin(), pool.end());
        const auto n = aggregate_national("XAA", rs);
        REQUIRE(n.segments.size() == pool.size());
        for (std::size_t k = 0; k < pool.size(); ++k) {
            CHECK(n.segments[k].lcoh_eur_per_kg == std::get<0>(pool[k]));
            CHECK(n.segments[k].region_id == std::get<1>(pool[k]));
            CHECK(n.segments[k].step == std::get<2>(pool[k]));
            CHECK(n.segments[k].h2_twh == doctest::Approx(std::get<3>(pool[k])).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(aggregate_national("XAA", std::span<const CostPotentialCurve>{}), ContractViolation);
}
