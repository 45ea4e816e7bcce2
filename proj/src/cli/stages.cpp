#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "h2atlas/eligibility.hpp"
#include "h2atlas/h2opt.hpp"
#include "h2atlas/numeric.hpp"
#include "h2atlas/res_sim.hpp"
#include "h2atlas/socio.hpp"
#include "h2atlas/water.hpp"
#include "internal.hpp"

namespace h2atlas::pipeline {

using geodata::RasterGrid;
using namespace detail;

std::string_view to_string(Stage s) noexcept
{
    switch (s) {
    case Stage::eligibility: return "eligibility";
    case Stage::placement: return "placement";
    case Stage::simulation: return "simulation";
    case Stage::water: return "water";
    case Stage::optimization: return "optimization";
    case Stage::setaside: return "setaside";
    case Stage::socio: return "socio";
    }
    return "?";
}

std::string stage_dir_name(Stage s)
{
    const auto i = static_cast<int>(s) + 1;
    return (i < 10 ? "0" : "") + std::to_string(i) + "_" + std::string(to_string(s));
}

namespace detail {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

void write_table(const fs::path& path, std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
{
    CsvTable t{std::move(header), std::move(rows)};
    write_text(path, format_csv(t));
}

fs::path stage_path(const RunConfig& c, Stage s)
{
    return c.out_dir / stage_dir_name(s);
}

RegionSet load_region_set(const RunConfig& c)
{
    const fs::path dir = stage_path(c, Stage::eligibility);
    const RasterGrid index = geodata::load_raster(dir / "region_index.asc");
    const CsvTable t = read_csv(dir / "regions.csv");
    RegionSet rs;
    rs.grid = index.geometry();
    rs.cell_region.assign(index.size(), -1);
    std::vector<std::vector<std::size_t>> cells(t.rows.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index.is_nodata(i))
            continue;
        const auto r = static_cast<std::size_t>(index[i]);
        if (r >= cells.size())
            throw StructuralError("region_index.asc refers to region " + std::to_string(r) + " not in regions.csv");
        rs.cell_region[i] = static_cast<std::int32_t>(r);
        cells[r].push_back(i);
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        rs.regions.push_back(geodata::make_region(t.text(r, "gid"), t.text(r, "country"), rs.grid, std::move(cells[r])));
    return rs;
}

std::vector<double> region_values_to_cells(const RegionSet& rs, const std::map<std::string, double>& by_gid)
{
    std::vector<double> v(rs.grid.size(), NAN);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (rs.cell_region[i] < 0)
            continue;
        const auto it = by_gid.find(rs.regions[static_cast<std::size_t>(rs.cell_region[i])].id);
        if (it != by_gid.end())
            v[i] = it->second;
    }
    return v;
}

} // namespace detail

namespace {

constexpr std::array<Technology, 3> kPlacedTechs{Technology::pv, Technology::wind, Technology::geothermal};

std::string fmt(double v)
{
    return format_number(v);
}

RasterGrid load_aligned(const fs::path& path, const geodata::GridGeometry& grid, const std::string& what)
{
    RasterGrid r = geodata::load_raster(path);
    geodata::require_aligned(grid, r.geometry(), what);
    return r;
}

std::map<std::string, std::map<std::string, double>> load_countries(const RunConfig& c)
{
    const CsvTable t = read_csv(c.resolve(c.countries));
    std::map<std::string, std::map<std::string, double>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t col = 1; col < t.header.size(); ++col)
            out[t.rows[r][0]][t.header[col]] = parse_number(t.rows[r][col], c.countries.string(), r + 2, t.header[col]);
    return out;
}

double country_value(const std::map<std::string, std::map<std::string, double>>& countries, const std::string& iso,
                     const std::string& key)
{
    const auto it = countries.find(iso);
    if (it == countries.end())
        throw InputError("country table has no row for " + iso);
    const auto jt = it->second.find(key);
    if (jt == it->second.end())
        throw InputError("country table has no column " + key);
    return jt->second;
}

bool tech_enabled(const RunConfig& c, Technology t)
{
    switch (t) {
    case Technology::pv: return c.pv.enabled;
    case Technology::wind: return c.wind.enabled;
    case Technology::geothermal: return !c.geothermal_capacity.empty();
    case Technology::hydro: return !c.hydro_table.empty();
    }
    return false;
}

// ---------------------------------------------------------------------------

void stage_eligibility(const RunConfig& c, const fs::path& dir)
{
    const RasterGrid reference = geodata::load_raster(c.resolve(c.elevation));
    const auto grid = reference.geometry();
    auto boundaries = geodata::load_boundaries(c.resolve(c.boundaries));
    std::vector<geodata::RegionBoundary> selected;
    for (const auto& id : c.regions) {
        const auto it = std::find_if(boundaries.begin(), boundaries.end(), [&](const auto& b) { return b.gid == id; });
        if (it == boundaries.end())
            throw InputError("unknown region " + id);
        selected.push_back(*it);
    }
    const auto raster = geodata::rasterize_regions(selected, grid);

    RasterGrid index(grid, RasterGrid::kDefaultNodata, RasterGrid::kDefaultNodata);
    for (std::size_t i = 0; i < index.size(); ++i)
        if (raster.cell_region[i] >= 0)
            index[i] = raster.cell_region[i];
    geodata::save_raster(index, dir / "region_index.asc");

    std::vector<std::vector<std::string>> region_rows, elig_rows, excl_rows;
    for (std::size_t r = 0; r < raster.regions.size(); ++r) {
        const auto& reg = raster.regions[r];
        region_rows.push_back({std::to_string(r), reg.id, reg.country_code, std::to_string(reg.mask.size()),
                               fmt(reg.mask.empty() ? 0.0 : reg.area_km2)});
    }
    write_table(dir / "regions.csv", {"index", "gid", "country", "cells", "area_km2"}, std::move(region_rows));
    std::vector<std::string> notes = raster.warnings;

    // one distance field per criterion, shared by every region
    std::vector<eligibility::Criterion> all;
    std::vector<RasterGrid> distances(c.criteria.size());
    for (const auto& cc : c.criteria) {
        eligibility::Criterion k;
        k.name = cc.name;
        k.feature = geodata::mask_from_raster(load_aligned(c.resolve(cc.feature), grid, "criterion " + cc.name));
        k.buffer_m = cc.buffer_m;
        all.push_back(std::move(k));
    }
    parallel_for(all.size(), c.threads, [&](std::size_t k) { distances[k] = geodata::distance_to_feature(all[k].feature); });

    for (Technology t : kPlacedTechs) {
        if (!tech_enabled(c, t))
            continue;
        std::vector<eligibility::Criterion> crit;
        std::vector<RasterGrid> dist;
        for (std::size_t k = 0; k < c.criteria.size(); ++k) {
            const auto& techs = c.criteria[k].technologies;
            if (std::find(techs.begin(), techs.end(), t) == techs.end())
                continue;
            crit.push_back(all[k]);
            crit.back().technology = t;
            dist.push_back(distances[k]);
        }
        RasterGrid eligible(grid, RasterGrid::kDefaultNodata, RasterGrid::kDefaultNodata);
        for (const auto& reg : raster.regions) {
            if (reg.mask.empty())
                continue;
            const auto res = eligibility::combine_exclusions(crit, reg, dist);
            for (std::size_t idx : reg.mask)
                eligible[idx] = res.eligible[idx] ? 1.0 : 0.0;
            elig_rows.push_back({reg.id, std::string(to_string(t)), fmt(res.region_area_km2),
                                 fmt(res.eligible_area_km2), fmt(res.eligible_share)});
            for (const auto& [name, share] : res.per_criterion_excluded_share)
                excl_rows.push_back({reg.id, std::string(to_string(t)), name, fmt(share)});
        }
        geodata::save_raster(eligible, dir / ("eligible_" + std::string(to_string(t)) + ".asc"));
    }
    write_table(dir / "eligibility.csv",
                {"gid", "technology", "region_area_km2", "eligible_area_km2", "eligible_share"}, std::move(elig_rows));
    write_table(dir / "exclusions.csv", {"gid", "technology", "criterion", "excluded_share"}, std::move(excl_rows));
    std::string text;
    for (const auto& n : notes)
        text += n + "\n";
    write_text(dir / "warnings.txt", text);
}

// ---------------------------------------------------------------------------

struct ClassRow {
    std::string gid;
    Technology technology;
    std::size_t cls = 0;
    std::size_t cells = 0;
    double area_km2 = 0.0;
    double capacity_mw = 0.0;
    double resource_factor = 1.0;
};

void stage_placement(const RunConfig& c, const fs::path& dir)
{
    const RegionSet rs = load_region_set(c);
    const fs::path up = stage_path(c, Stage::eligibility);
    std::vector<ClassRow> rows;

    for (Technology t : kPlacedTechs) {
        if (!tech_enabled(c, t))
            continue;
        const std::string name(to_string(t));
        const RasterGrid eligible = load_aligned(up / ("eligible_" + name + ".asc"), rs.grid, "eligible mask");
        RasterGrid capacity(rs.grid, RasterGrid::kDefaultNodata, RasterGrid::kDefaultNodata);
        const ResourceConfig* rc = t == Technology::pv ? &c.pv : t == Technology::wind ? &c.wind : nullptr;
        RasterGrid factor(rs.grid, RasterGrid::kDefaultNodata, 1.0);
        if (rc && !rc->resource.empty())
            factor = load_aligned(c.resolve(rc->resource), rs.grid, name + " resource");
        RasterGrid geo_cap;
        if (t == Technology::geothermal)
            geo_cap = load_aligned(c.resolve(c.geothermal_capacity), rs.grid, "geothermal capacity");

        for (const auto& reg : rs.regions) {
            std::vector<std::size_t> cells;
            for (std::size_t idx : reg.mask) {
                capacity[idx] = 0.0;
                if (eligible.is_nodata(idx) || eligible[idx] == 0.0)
                    continue;
                double mw = 0.0;
                if (t == Technology::geothermal)
                    mw = geo_cap.is_nodata(idx) ? 0.0 : std::max(0.0, geo_cap[idx]);
                else
                    mw = rc->density_mw_per_km2 * geodata::cell_area_km2(rs.grid, idx);
                if (mw <= 0.0)
                    continue;
                if (factor.is_nodata(idx) || !(factor[idx] > 0.0))
                    throw InputError(name + " resource factor missing or non-positive at cell " + std::to_string(idx));
                capacity[idx] = mw;
                cells.push_back(idx);
            }
            if (cells.empty())
                continue;
            // resource classes: equal cell counts after sorting by factor
            std::stable_sort(cells.begin(), cells.end(),
                             [&](std::size_t a, std::size_t b) { return factor[a] > factor[b]; });
            const std::size_t k = rc && !rc->resource.empty()
                ? std::min(cells.size(), static_cast<std::size_t>(rc->classes))
                : 1;
            for (std::size_t cl = 0; cl < k; ++cl) {
                const std::size_t lo = cl * cells.size() / k, hi = (cl + 1) * cells.size() / k;
                CompensatedSum cap, area, weighted;
                for (std::size_t j = lo; j < hi; ++j) {
                    cap.add(capacity[cells[j]]);
                    area.add(geodata::cell_area_km2(rs.grid, cells[j]));
                    weighted.add(capacity[cells[j]] * factor[cells[j]]);
                }
                rows.push_back({reg.id, t, cl, hi - lo, area.value(), cap.value(), weighted.value() / cap.value()});
            }
        }
        geodata::save_raster(capacity, dir / ("capacity_" + name + ".asc"));
    }

    if (!c.hydro_table.empty()) {
        const CsvTable h = read_csv(c.resolve(c.hydro_table));
        std::set<std::string> selected(c.regions.begin(), c.regions.end());
        for (std::size_t r = 0; r < h.rows.size(); ++r) {
            const std::string gid = h.text(r, "gid");
            if (!selected.count(gid))
                continue;
            const double cap = h.number(r, "capacity_mw");
            if (!(cap >= 0.0))
                throw InputError("hydro capacity must be >= 0 for " + gid);
            if (cap > 0.0)
                rows.push_back({gid, Technology::hydro, 0, 0, 0.0, cap, 1.0});
        }
    }

    std::stable_sort(rows.begin(), rows.end(), [](const ClassRow& a, const ClassRow& b) {
        if (a.gid != b.gid)
            return a.gid < b.gid;
        if (a.technology != b.technology)
            return a.technology < b.technology;
        return a.cls < b.cls;
    });
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows)
        out.push_back({r.gid, std::string(to_string(r.technology)), std::to_string(r.cls), std::to_string(r.cells),
                       fmt(r.area_km2), fmt(r.capacity_mw), fmt(r.resource_factor)});
    write_table(dir / "classes.csv",
                {"gid", "technology", "class", "cells", "area_km2", "capacity_mw", "resource_factor"}, std::move(out));
}

std::vector<ClassRow> read_classes(const fs::path& path)
{
    const CsvTable t = read_csv(path);
    std::vector<ClassRow> rows;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto tech = technology_from_string(t.text(r, "technology"));
        if (!tech)
            throw InputError(path.string() + ": unknown technology " + t.text(r, "technology"));
        rows.push_back({t.text(r, "gid"), *tech, static_cast<std::size_t>(t.number(r, "class")),
                        static_cast<std::size_t>(t.number(r, "cells")), t.number(r, "area_km2"),
                        t.number(r, "capacity_mw"), t.number(r, "resource_factor")});
    }
    return rows;
}

std::string class_column(const ClassRow& r)
{
    return std::string(to_string(r.technology)) + "_" + std::to_string(r.cls);
}

// ---------------------------------------------------------------------------

void stage_simulation(const RunConfig& c, const fs::path& dir)
{
    const auto classes = read_classes(stage_path(c, Stage::placement) / "classes.csv");
    std::map<std::string, std::vector<ClassRow>> by_region;
    for (const auto& r : classes)
        by_region[r.gid].push_back(r);
    std::map<std::string, std::string> hydro_series;
    if (!c.hydro_table.empty()) {
        const CsvTable h = read_csv(c.resolve(c.hydro_table));
        for (std::size_t r = 0; r < h.rows.size(); ++r)
            hydro_series[h.text(r, "gid")] = h.text(r, "series");
    }
    const auto turbine = c.turbine.empty() ? res_sim::WindTurbine::synthetic_default()
                                           : res_sim::WindTurbine::from_csv(c.resolve(c.turbine));

    std::vector<std::string> gids;
    for (const auto& [g, v] : by_region)
        gids.push_back(g);
    std::vector<std::vector<std::vector<std::string>>> summary(gids.size());
    fs::create_directories(dir / "profiles");

    parallel_for(gids.size(), c.threads, [&](std::size_t i) {
        const auto& gid = gids[i];
        const auto& rows = by_region.at(gid);
        const auto weather = res_sim::load_weather_csv(c.resolve(c.weather_dir) / (gid + ".csv"));
        std::vector<res_sim::GenerationProfile> profiles;
        for (const auto& r : rows) {
            switch (r.technology) {
            case Technology::pv: {
                auto w = weather;
                for (double& g : w.ghi_w_per_m2)
                    g *= r.resource_factor;
                profiles.push_back(res_sim::simulate_pv(w));
                break;
            }
            case Technology::wind: {
                auto w = weather;
                for (double& v : w.wind_speed_ms)
                    v *= r.resource_factor;
                profiles.push_back(res_sim::simulate_wind(w, turbine, c.wind_shear));
                break;
            }
            case Technology::geothermal:
                profiles.push_back(res_sim::geothermal_profile(c.geothermal_availability, weather.hours()));
                break;
            case Technology::hydro: {
                const auto it = hydro_series.find(gid);
                if (it == hydro_series.end())
                    throw InputError("no hydro series for " + gid);
                const fs::path p = c.resolve(c.hydro_table).parent_path() / it->second;
                const CsvTable s = read_csv(p);
                std::vector<res_sim::HydroSample> samples;
                for (std::size_t k = 0; k < s.rows.size(); ++k)
                    samples.push_back({s.number(k, "hour"), s.number(k, "cf")});
                profiles.push_back(res_sim::resample_hydro(samples, weather.hours()));
                break;
            }
            }
        }
        // representative year: median of the capacity-weighted yearly generation
        std::vector<double> scores(weather.years(), 0.0);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto ym = res_sim::yearly_means(profiles[k]);
            for (std::size_t y = 0; y < scores.size(); ++y)
                scores[y] += rows[k].capacity_mw * ym[y];
        }
        const std::size_t year = res_sim::representative_year(scores);

        std::vector<std::string> header{"hour"};
        std::vector<res_sim::GenerationProfile> sliced;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            header.push_back(class_column(rows[k]));
            sliced.push_back(res_sim::year_slice(profiles[k], year));
            const auto te = res_sim::default_techno_economics(to_string(rows[k].technology), c.year);
            const double aep = sliced.back().full_load_hours;
            summary[i].push_back({gid, std::string(to_string(rows[k].technology)), std::to_string(rows[k].cls),
                                  fmt(rows[k].capacity_mw), fmt(sliced.back().mean_cf), fmt(aep),
                                  aep > 0.0 ? fmt(res_sim::lcoe(te, aep)) : "inf", std::to_string(year)});
        }
        std::vector<std::vector<std::string>> body(res_sim::kHoursPerYear);
        for (std::size_t t = 0; t < res_sim::kHoursPerYear; ++t) {
            body[t].push_back(std::to_string(t));
            for (const auto& p : sliced)
                body[t].push_back(fmt(p.capacity_factor[t]));
        }
        write_table(dir / "profiles" / (gid + ".csv"), std::move(header), std::move(body));
    });

    std::vector<std::vector<std::string>> out;
    for (auto& s : summary)
        for (auto& r : s)
            out.push_back(std::move(r));
    write_table(dir / "simulation.csv",
                {"gid", "technology", "class", "capacity_mw", "mean_cf", "full_load_hours", "lcoe_eur_per_kwh",
                 "representative_year"},
                std::move(out));
}

// ---------------------------------------------------------------------------

void stage_water(const RunConfig& c, const fs::path& dir)
{
    const RegionSet rs = load_region_set(c);
    const RasterGrid recharge = load_aligned(c.resolve_template(c.recharge), rs.grid, "recharge");
    const RasterGrid consumption = load_aligned(c.resolve_template(c.consumption), rs.grid, "consumption");
    const RasterGrid elevation = load_aligned(c.resolve(c.elevation), rs.grid, "elevation");
    const auto coast = geodata::mask_from_raster(load_aligned(c.resolve(c.coast), rs.grid, "coast"));
    const auto scenario = water::YieldScenario::make(water::yield_level_from_string(c.water_scenario),
                                                     water::climate_from_string(c.climate), c.year);
    const RasterGrid sy = water::sustainable_yield(recharge, consumption, scenario);
    geodata::save_raster(sy, dir / "sustainable_yield.asc");
    const RasterGrid coast_m = geodata::distance_to_feature(coast);

    water::DesalParams dp;
    dp.desal_base_eur_per_m3 = c.desal_base_eur_per_m3;
    dp.pipeline_capex_eur_per_m3a_km = c.pipeline_capex_eur_per_m3a_km;
    dp.friction_kwh_per_m3_km = c.friction_kwh_per_m3_km;

    std::vector<std::vector<std::string>> rows;
    std::map<std::string, double> sy_mean;
    for (const auto& reg : rs.regions) {
        if (reg.mask.empty())
            continue;
        const auto budget = water::region_water_budget(sy, reg);
        CompensatedSum dist, elev;
        std::size_t n_dist = 0, n_elev = 0;
        for (std::size_t idx : reg.mask) {
            if (std::isfinite(coast_m[idx])) {
                dist.add(coast_m[idx] * 1e-3);
                ++n_dist;
            }
            if (!elevation.is_nodata(idx)) {
                elev.add(elevation[idx]);
                ++n_elev;
            }
        }
        if (n_dist == 0)
            throw InputError("no coastline reachable from region " + reg.id);
        const double km = dist.value() / static_cast<double>(n_dist);
        const double dh = n_elev ? elev.value() / static_cast<double>(n_elev) : 0.0;
        const double desal = water::desal_transport_cost(km, dh, c.electricity_price_eur_per_kwh, dp);
        rows.push_back({reg.id, reg.country_code, fmt(budget.volume_m3_per_year), fmt(budget.mean_mm_per_year),
                        std::to_string(budget.nodata_cells), fmt(km), fmt(dh), fmt(c.groundwater_cost_eur_per_m3),
                        fmt(desal)});
        sy_mean[reg.id] = budget.mean_mm_per_year;
    }
    write_table(dir / "water.csv",
                {"gid", "country", "groundwater_m3", "sy_mean_mm", "nodata_cells", "coast_distance_km",
                 "elevation_gain_m", "groundwater_cost_eur_per_m3", "desal_cost_eur_per_m3"},
                std::move(rows));
}

// ---------------------------------------------------------------------------

void stage_optimization(const RunConfig& c, const fs::path& dir)
{
    const RegionSet rs = load_region_set(c);
    const auto classes = read_classes(stage_path(c, Stage::placement) / "classes.csv");
    const CsvTable water_t = read_csv(stage_path(c, Stage::water) / "water.csv");
    std::map<std::string, std::size_t> water_row;
    for (std::size_t r = 0; r < water_t.rows.size(); ++r)
        water_row[water_t.text(r, "gid")] = r;

    const std::size_t n = rs.regions.size();
    std::vector<std::vector<std::vector<std::string>>> curve_rows(n);
    std::vector<std::vector<std::string>> summary_rows(n);

    parallel_for(n, c.threads, [&](std::size_t i) {
        const auto& reg = rs.regions[i];
        auto in = h2opt::default_system(reg.id, c.year);
        in.efficiency_kwh_per_kg = c.efficiency_kwh_per_kg;
        in.battery_offered = c.battery;
        in.battery_round_trip = c.battery_round_trip;
        in.water_use_l_per_kg = c.water_use_l_per_kg;
        const auto wr = water_row.find(reg.id);
        double gw_m3 = 0.0;
        if (wr != water_row.end()) {
            gw_m3 = water_t.number(wr->second, "groundwater_m3");
            in.water = water::supply_curve(water_t.number(wr->second, "groundwater_cost_eur_per_m3"), gw_m3,
                                           water_t.number(wr->second, "desal_cost_eur_per_m3"));
        }

        std::vector<const ClassRow*> mine;
        for (const auto& r : classes)
            if (r.gid == reg.id)
                mine.push_back(&r);
        const fs::path pf = stage_path(c, Stage::simulation) / "profiles" / (reg.id + ".csv");
        if (!mine.empty()) {
            const CsvTable prof = read_csv(pf);
            for (const auto* r : mine) {
                const auto col = prof.column(class_column(*r));
                std::vector<double> cf(prof.rows.size());
                for (std::size_t t = 0; t < cf.size(); ++t)
                    cf[t] = parse_number(prof.rows[t][col], pf.string(), t + 2, "capacity factor");
                h2opt::TechnologyInput ti;
                ti.technology = r->technology;
                ti.ceiling_mw = r->capacity_mw;
                ti.profile = res_sim::GenerationProfile::from_series(std::move(cf));
                ti.economics = res_sim::default_techno_economics(to_string(r->technology), c.year);
                ti.dispatchable = r->technology == Technology::geothermal;
                in.technologies.push_back(std::move(ti));
            }
        }
        const double potential_twh = in.technologies.empty() ? 0.0 : h2opt::max_h2_potential_twh(in);
        if (!(potential_twh > 0.0)) {
            summary_rows[i] = {reg.id, reg.country_code, fmt(reg.area_km2), "0", "0", "nan", "nan", "0", "no_potential"};
            return;
        }
        const auto curve = h2opt::cost_potential_curve(in, c.steps);
        double gw_share = 0.0;
        std::vector<h2opt::StepWater> steps_water;
        if (!in.water.empty()) {
            const auto w = h2opt::groundwater_feasible_share(curve, in);
            gw_share = w.feasible_share;
            steps_water = w.steps;
        }
        double map_lcoh = NAN, min_lcoh = INFINITY;
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            const auto& p = curve.points[k];
            const auto& d = p.design;
            auto cap = [&](Technology t) {
                const auto it = d.capacity_mw.find(t);
                return it == d.capacity_mw.end() ? 0.0 : it->second;
            };
            const bool has_w = k < steps_water.size();
            curve_rows[i].push_back({reg.id, reg.country_code, fmt(p.step), fmt(p.h2_twh), fmt(p.lcoh_eur_per_kg),
                                     fmt(cap(Technology::pv)), fmt(cap(Technology::wind)), fmt(cap(Technology::hydro)),
                                     fmt(cap(Technology::geothermal)), fmt(d.electrolyzer_mw), fmt(d.battery_mwh),
                                     fmt(d.battery_mw), fmt(d.electrolyzer_flh), fmt(d.curtailed_share),
                                     fmt(d.water_m3), fmt(has_w ? steps_water[k].groundwater_m3 : 0.0),
                                     fmt(has_w ? steps_water[k].desalination_m3 : 0.0), fmt(d.water_cost_share),
                                     has_w && steps_water[k].groundwater_sufficient ? "1" : "0"});
            if (p.step == c.map_step)
                map_lcoh = p.lcoh_eur_per_kg;
            min_lcoh = std::min(min_lcoh, p.lcoh_eur_per_kg);
        }
        const double kg = h2opt::max_h2_potential_kg(in);
        summary_rows[i] = {reg.id,        reg.country_code,    fmt(reg.area_km2), fmt(potential_twh),
                           fmt(kg * 1e-3 / reg.area_km2), fmt(min_lcoh), fmt(map_lcoh), fmt(gw_share), "ok"};
    });

    std::vector<std::vector<std::string>> curves;
    for (auto& rows : curve_rows)
        for (auto& r : rows)
            curves.push_back(std::move(r));
    write_table(dir / "curves.csv",
                {"gid", "country", "step", "h2_twh", "lcoh_eur_per_kg", "pv_mw", "wind_mw", "hydro_mw",
                 "geothermal_mw", "electrolyzer_mw", "battery_mwh", "battery_mw", "electrolyzer_flh",
                 "curtailed_share", "water_m3", "groundwater_m3", "desalination_m3", "water_cost_share",
                 "groundwater_sufficient"},
                std::move(curves));
    write_table(dir / "summary.csv",
                {"gid", "country", "area_km2", "potential_twh", "h2_t_per_km2", "min_lcoh_eur_per_kg",
                 "map_lcoh_eur_per_kg", "groundwater_feasible_share", "status"},
                std::move(summary_rows));
}

// ---------------------------------------------------------------------------

void stage_setaside(const RunConfig& c, const fs::path& dir)
{
    const CsvTable t = read_csv(stage_path(c, Stage::optimization) / "curves.csv");
    std::map<std::string, std::map<std::string, h2opt::CostPotentialCurve>> by_country;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto& curve = by_country[t.text(r, "country")][t.text(r, "gid")];
        curve.region_id = t.text(r, "gid");
        h2opt::CurvePoint p;
        p.step = t.number(r, "step");
        p.h2_twh = t.number(r, "h2_twh");
        p.lcoh_eur_per_kg = t.number(r, "lcoh_eur_per_kg");
        curve.points.push_back(p);
    }
    const auto countries = load_countries(c);
    std::vector<std::vector<std::string>> nat_rows, set_rows, exp_rows;
    auto emit = [](std::vector<std::vector<std::string>>& rows, const h2opt::NationalCurve& n) {
        double cum = 0.0;
        for (std::size_t k = 0; k < n.segments.size(); ++k) {
            const auto& s = n.segments[k];
            cum += s.h2_twh;
            rows.push_back({n.country, std::to_string(k), s.region_id, fmt(s.step), fmt(s.h2_twh), fmt(cum),
                            fmt(s.lcoh_eur_per_kg)});
        }
    };
    for (const auto& [iso, regions] : by_country) {
        std::vector<h2opt::CostPotentialCurve> curves;
        for (const auto& [gid, cv] : regions)
            curves.push_back(cv);
        const auto national = h2opt::aggregate_national(iso, curves);
        h2opt::DemandInputs demand;
        demand.electricity_twh = country_value(countries, iso, "electricity_demand_twh");
        demand.h2_twh = country_value(countries, iso, "h2_demand_twh");
        const auto sa = h2opt::demand_set_aside(national, demand, c.efficiency_kwh_per_kg);
        emit(nat_rows, national);
        emit(exp_rows, sa.exportable);
        set_rows.push_back({iso, fmt(national.total_twh()), fmt(demand.electricity_twh), fmt(demand.h2_twh),
                            fmt(sa.reserved_twh), fmt(sa.reserved_share), sa.over_demand ? "1" : "0",
                            fmt(sa.exportable.total_twh()), fmt(national.weighted_mean_lcoh.back())});
    }
    const std::vector<std::string> seg_header{"country", "rank", "gid", "step", "h2_twh", "cumulative_twh",
                                              "lcoh_eur_per_kg"};
    write_table(dir / "national_curves.csv", seg_header, std::move(nat_rows));
    write_table(dir / "exportable.csv", seg_header, std::move(exp_rows));
    write_table(dir / "setaside.csv",
                {"country", "potential_twh", "electricity_demand_twh", "h2_demand_twh", "reserved_twh",
                 "reserved_share", "over_demand", "exportable_twh", "weighted_mean_lcoh"},
                std::move(set_rows));
}

// ---------------------------------------------------------------------------

void stage_socio(const RunConfig& c, const fs::path& dir)
{
    const RegionSet rs = load_region_set(c);
    const auto countries = load_countries(c);
    std::map<std::string, double> unemployment, employment;
    for (const auto& reg : rs.regions) {
        unemployment[reg.country_code] = country_value(countries, reg.country_code, "unemployment_rate");
        employment[reg.country_code] = country_value(countries, reg.country_code, "employment_factor");
    }
    socio::SocioInputs in;
    in.electricity_access = load_aligned(c.resolve(c.electricity_access), rs.grid, "electricity access");
    in.clean_fuel_access = load_aligned(c.resolve(c.clean_fuel_access), rs.grid, "clean fuel access");
    in.population_density = load_aligned(c.resolve(c.population_density), rs.grid, "population density");
    in.labor_force_density = load_aligned(c.resolve(c.labor_force_density), rs.grid, "labor force density");
    in.biomass_dependence = load_aligned(c.resolve(c.biomass_dependence), rs.grid, "biomass dependence");
    in.poverty_headcount = load_aligned(c.resolve(c.poverty_headcount), rs.grid, "poverty headcount");
    in.unemployment_rate = socio::broadcast_country_values(rs.grid, rs.regions, unemployment);
    in.employment_factor = socio::broadcast_country_values(rs.grid, rs.regions, employment);

    // installable density from the placed PV and wind capacity
    RasterGrid installable(rs.grid, RasterGrid::kDefaultNodata, 0.0);
    for (Technology t : {Technology::pv, Technology::wind}) {
        const fs::path p = stage_path(c, Stage::placement) / ("capacity_" + std::string(to_string(t)) + ".asc");
        if (!fs::exists(p))
            continue;
        const RasterGrid cap = load_aligned(p, rs.grid, "placed capacity");
        for (std::size_t i = 0; i < cap.size(); ++i)
            if (!cap.is_nodata(i))
                installable[i] += cap[i] / geodata::cell_area_km2(rs.grid, i);
    }

    // restrict every layer to the study regions
    auto clip = [&](RasterGrid g) {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (rs.cell_region[i] < 0)
                g[i] = g.nodata();
        return g;
    };
    const RasterGrid ae = clip(socio::energy_access_indicator(in, {c.access_weight_electricity, c.access_weight_clean_fuel}));
    const RasterGrid me = clip(socio::macroeconomic_indicator(in, installable));
    const RasterGrid oe = clip(socio::other_effects_indicator(in));
    const auto composite = socio::composite_indicator(ae, me, oe, {c.weight_ae, c.weight_me, c.weight_oe});
    geodata::save_raster(ae, dir / "ae.asc");
    geodata::save_raster(me, dir / "me.asc");
    geodata::save_raster(oe, dir / "oe.asc");
    geodata::save_raster(composite.score, dir / "composite.asc");

    std::vector<std::vector<std::string>> rows;
    const std::pair<const char*, const RasterGrid*> layers[] = {
        {"AE", &ae}, {"ME", &me}, {"OE", &oe}, {"composite", &composite.score}};
    std::map<std::string, std::vector<std::vector<std::string>>> by_country;
    for (const auto& [name, grid] : layers)
        for (const auto& s : socio::regional_stats(*grid, rs.regions))
            by_country[s.country].push_back({s.country, name, std::to_string(s.cells), fmt(s.median), fmt(s.q25),
                                             fmt(s.q75), fmt(s.iqr), fmt(s.mean)});
    for (auto& [iso, r] : by_country)
        for (auto& row : r)
            rows.push_back(std::move(row));
    write_table(dir / "stats.csv", {"country", "indicator", "cells", "median", "q25", "q75", "iqr", "mean"},
                std::move(rows));
    std::string text;
    for (const auto& w : composite.warnings)
        text += w + "\n";
    write_text(dir / "warnings.txt", text);
}

void dispatch(const RunConfig& c, Stage s, const fs::path& dir)
{
    switch (s) {
    case Stage::eligibility: stage_eligibility(c, dir); break;
    case Stage::placement: stage_placement(c, dir); break;
    case Stage::simulation: stage_simulation(c, dir); break;
    case Stage::water: stage_water(c, dir); break;
    case Stage::optimization: stage_optimization(c, dir); break;
    case Stage::setaside: stage_setaside(c, dir); break;
    case Stage::socio: stage_socio(c, dir); break;
    }
}

} // namespace

void run_stage(const RunConfig& c, Stage s)
{
    const fs::path dir = stage_path(c, s);
    const fs::path failed = c.out_dir / "failed" / stage_dir_name(s);
    fs::remove_all(dir);
    fs::remove_all(failed);
    fs::create_directories(dir);
    try {
        dispatch(c, s, dir);
        render_stage(c, s);
    } catch (const std::exception& e) {
        fs::create_directories(failed.parent_path());
        fs::rename(dir, failed);
        throw StageFailure(s, e.what());
    }
    if (fs::exists(c.out_dir / "failed") && fs::is_empty(c.out_dir / "failed"))
        fs::remove(c.out_dir / "failed");
}

void render_report(const RunConfig& c)
{
    for (Stage s : kStages)
        if (fs::exists(stage_path(c, s)))
            render_stage(c, s);
}

Manifest run_pipeline(const RunConfig& c)
{
    for (Stage s : kStages)
        run_stage(c, s);
    render_report(c);
    return write_manifest(c);
}

} // namespace h2atlas::pipeline
