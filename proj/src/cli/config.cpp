#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "h2atlas/format.hpp"
#include "h2atlas/geodata.hpp"
#include "h2atlas/h2opt.hpp"
#include "h2atlas/pipeline.hpp"

namespace h2atlas::pipeline {

namespace {

// Typed access to one TOML table; every problem is appended to `failures`
// and a default is returned so that checking continues.
class Reader {
public:
    Reader(const toml::table* table, std::string prefix, std::vector<std::string>& failures)
        : table_(table), prefix_(std::move(prefix)), failures_(failures)
    {
    }

    std::string key(std::string_view k) const { return prefix_.empty() ? std::string(k) : prefix_ + "." + std::string(k); }

    void fail(std::string_view k, const std::string& what) { failures_.push_back(key(k) + ": " + what); }

    const toml::node* node(std::string_view k)
    {
        seen_.insert(std::string(k));
        return table_ ? table_->get(k) : nullptr;
    }

    double number(std::string_view k, double def, double lo, double hi, bool lo_open = false)
    {
        const auto* n = node(k);
        if (!n)
            return def;
        std::optional<double> v = n->value<double>();
        if (!v || !n->is_number()) {
            fail(k, "expected a number");
            return def;
        }
        if (!(lo_open ? *v > lo : *v >= lo) || !(*v <= hi) || !std::isfinite(*v)) {
            fail(k, "value " + format_number(*v) + " outside " + (lo_open ? "(" : "[") + format_number(lo) + ","
                        + format_number(hi) + "]");
            return def;
        }
        return *v;
    }

    int integer(std::string_view k, int def, int lo, int hi)
    {
        const auto* n = node(k);
        if (!n)
            return def;
        if (!n->is_integer()) {
            fail(k, "expected an integer");
            return def;
        }
        const auto v = n->value<std::int64_t>().value_or(def);
        if (v < lo || v > hi) {
            fail(k, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
            return def;
        }
        return static_cast<int>(v);
    }

    bool boolean(std::string_view k, bool def)
    {
        const auto* n = node(k);
        if (!n)
            return def;
        if (!n->is_boolean()) {
            fail(k, "expected true or false");
            return def;
        }
        return *n->value<bool>();
    }

    std::string text(std::string_view k, std::string def)
    {
        const auto* n = node(k);
        if (!n)
            return def;
        if (!n->is_string()) {
            fail(k, "expected a string");
            return def;
        }
        return *n->value<std::string>();
    }

    void reject_unknown()
    {
        if (!table_)
            return;
        for (const auto& [k, v] : *table_)
            if (!seen_.count(std::string(k.str())))
                failures_.push_back(key(k.str()) + ": unknown key");
    }

private:
    const toml::table* table_;
    std::string prefix_;
    std::vector<std::string>& failures_;
    std::set<std::string> seen_;
};

const toml::table* subtable(const toml::table& root, std::string_view name, std::vector<std::string>& failures)
{
    const auto* n = root.get(name);
    if (!n)
        return nullptr;
    if (!n->is_table()) {
        failures.push_back(std::string(name) + ": expected a table");
        return nullptr;
    }
    return n->as_table();
}

std::string replace_all(std::string s, std::string_view what, std::string_view with)
{
    for (std::size_t pos = 0; (pos = s.find(what, pos)) != std::string::npos; pos += with.size())
        s.replace(pos, what.size(), with);
    return s;
}

toml::array to_array(const std::vector<double>& v)
{
    toml::array a;
    for (double x : v)
        a.push_back(x);
    return a;
}

} // namespace

fs::path RunConfig::resolve_template(const fs::path& p) const
{
    std::string s = replace_all(p.string(), "{climate}", climate);
    s = replace_all(s, "{horizon}", std::to_string(year));
    return resolve(s);
}

LoadedConfig load_config(const fs::path& path, const Overrides& overrides)
{
    const std::string text = read_text(path);
    toml::table root;
    try {
        root = toml::parse(text, path.string());
    } catch (const toml::parse_error& e) {
        throw ParseError(path.string(), e.source().begin.line, std::string(e.description()));
    }

    LoadedConfig out;
    RunConfig& c = out.config;
    auto& failures = out.failures;
    c.config_path = path;
    c.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");

    static const std::set<std::string> sections{"run",        "paths", "criteria",     "pv",    "wind",
                                                "geothermal", "hydro", "optimization", "water", "socio",
                                                "render"};
    for (const auto& [k, v] : root)
        if (!sections.count(std::string(k.str())))
            failures.push_back(std::string(k.str()) + ": unknown section");

    // run
    Reader run(subtable(root, "run", failures), "run", failures);
    c.year = run.integer("year", 2030, 0, 9999);
    if (overrides.year)
        c.year = *overrides.year;
    if (c.year != 2030 && c.year != 2050)
        failures.push_back("run.year: must be 2030 or 2050");
    if (const auto* n = run.node("regions")) {
        if (n->is_string() && *n->value<std::string>() == "all") {
            c.all_regions = true;
        } else if (const auto* a = n->as_array()) {
            for (const auto& e : *a) {
                if (!e.is_string())
                    failures.push_back("run.regions: entries must be region ids");
                else
                    c.regions.push_back(*e.value<std::string>());
            }
            if (a->empty())
                failures.push_back("run.regions: region set must not be empty");
        } else {
            failures.push_back("run.regions: expected \"all\" or an array of region ids");
        }
    } else {
        failures.push_back("run.regions: missing");
    }
    c.out_dir = c.resolve(run.text("out_dir", "out"));
    if (overrides.out_dir)
        c.out_dir = *overrides.out_dir;
    c.threads = run.integer("threads", 1, 1, 256);
    if (overrides.threads) {
        if (*overrides.threads < 1)
            failures.push_back("--threads: must be >= 1");
        else
            c.threads = *overrides.threads;
    }
    run.reject_unknown();

    // water first: file templates depend on climate
    Reader water(subtable(root, "water", failures), "water", failures);
    c.water_scenario = water.text("scenario", "medium");
    if (overrides.water_scenario)
        c.water_scenario = *overrides.water_scenario;
    if (c.water_scenario != "conservative" && c.water_scenario != "medium" && c.water_scenario != "extreme")
        failures.push_back("water.scenario: must be conservative, medium or extreme");
    c.climate = water.text("climate", "rcp26");
    if (overrides.climate)
        c.climate = *overrides.climate;
    if (c.climate != "rcp26" && c.climate != "rcp85")
        failures.push_back("water.climate: must be rcp26 or rcp85");
    c.groundwater_cost_eur_per_m3 = water.number("groundwater_cost_eur_per_m3", 0.10, 0.0, 1e3, true);
    c.electricity_price_eur_per_kwh = water.number("electricity_price_eur_per_kwh", 0.05, 0.0, 10.0);
    c.desal_base_eur_per_m3 = water.number("desal_base_eur_per_m3", 0.70, 0.0, 1e3, true);
    c.pipeline_capex_eur_per_m3a_km = water.number("pipeline_capex_eur_per_m3a_km", 0.0115, 0.0, 10.0);
    c.friction_kwh_per_m3_km = water.number("friction_kwh_per_m3_km", 0.004, 0.0, 10.0);
    water.reject_unknown();

    // paths
    Reader paths(subtable(root, "paths", failures), "paths", failures);
    std::vector<std::pair<std::string, fs::path>> must_exist;
    auto required = [&](std::string_view k, fs::path& dst, bool templated = false) {
        const std::string v = paths.text(k, "");
        if (v.empty()) {
            paths.fail(k, "missing");
            return;
        }
        dst = v;
        must_exist.emplace_back(paths.key(k), templated ? c.resolve_template(dst) : c.resolve(dst));
    };
    required("boundaries", c.boundaries);
    required("weather_dir", c.weather_dir);
    required("countries", c.countries);
    required("elevation", c.elevation);
    required("coast", c.coast);
    required("recharge", c.recharge, true);
    required("consumption", c.consumption, true);
    required("electricity_access", c.electricity_access);
    required("clean_fuel_access", c.clean_fuel_access);
    required("population_density", c.population_density);
    required("labor_force_density", c.labor_force_density);
    required("biomass_dependence", c.biomass_dependence);
    required("poverty_headcount", c.poverty_headcount);
    paths.reject_unknown();

    // criteria
    if (const auto* n = root.get("criteria")) {
        const auto* arr = n->as_array();
        if (!arr || !arr->is_array_of_tables()) {
            failures.push_back("criteria: expected an array of tables");
        } else {
            std::set<std::pair<Technology, std::string>> names;
            for (std::size_t i = 0; i < arr->size(); ++i) {
                Reader r((*arr)[i].as_table(), "criteria[" + std::to_string(i) + "]", failures);
                CriterionConfig cc;
                cc.name = r.text("name", "");
                if (cc.name.empty())
                    r.fail("name", "missing");
                cc.buffer_m = r.number("buffer_m", 0.0, 0.0, 1e7);
                const std::string feature = r.text("feature", "");
                if (feature.empty())
                    r.fail("feature", "missing");
                else {
                    cc.feature = feature;
                    must_exist.emplace_back(r.key("feature"), c.resolve(cc.feature));
                }
                if (const auto* t = r.node("technologies")) {
                    auto add = [&](const std::string& s) {
                        if (s == "all") {
                            cc.technologies = {Technology::pv, Technology::wind, Technology::geothermal};
                            return;
                        }
                        const auto tech = technology_from_string(s);
                        if (!tech || *tech == Technology::hydro)
                            r.fail("technologies", "unknown technology '" + s + "'");
                        else
                            cc.technologies.push_back(*tech);
                    };
                    if (t->is_string())
                        add(*t->value<std::string>());
                    else if (const auto* ta = t->as_array())
                        for (const auto& e : *ta)
                            add(e.value<std::string>().value_or("?"));
                    else
                        r.fail("technologies", "expected a string or an array");
                } else {
                    cc.technologies = {Technology::pv, Technology::wind, Technology::geothermal};
                }
                std::sort(cc.technologies.begin(), cc.technologies.end());
                cc.technologies.erase(std::unique(cc.technologies.begin(), cc.technologies.end()),
                                      cc.technologies.end());
                for (Technology t : cc.technologies)
                    if (!names.insert({t, cc.name}).second)
                        r.fail("name", "duplicate criterion '" + cc.name + "' for " + std::string(to_string(t)));
                r.reject_unknown();
                c.criteria.push_back(std::move(cc));
            }
        }
    }

    auto resource = [&](std::string_view section, ResourceConfig& rc, double density) {
        Reader r(subtable(root, section, failures), std::string(section), failures);
        rc.enabled = r.boolean("enabled", true);
        rc.density_mw_per_km2 = r.number("density_mw_per_km2", density, 0.0, 1e4);
        rc.classes = r.integer("classes", 3, 1, 50);
        const std::string res = r.text("resource", "");
        if (!res.empty()) {
            rc.resource = res;
            must_exist.emplace_back(r.key("resource"), c.resolve(rc.resource));
        }
        if (section == "wind") {
            c.wind_shear = r.number("shear_exponent", 0.14, 0.0, 1.0);
            const std::string turbine = r.text("turbine", "");
            if (!turbine.empty()) {
                c.turbine = turbine;
                must_exist.emplace_back(r.key("turbine"), c.resolve(c.turbine));
            }
        }
        r.reject_unknown();
    };
    resource("pv", c.pv, 50.0);
    resource("wind", c.wind, 7.5);

    {
        Reader r(subtable(root, "geothermal", failures), "geothermal", failures);
        const std::string cap = r.text("capacity", "");
        if (!cap.empty()) {
            c.geothermal_capacity = cap;
            must_exist.emplace_back(r.key("capacity"), c.resolve(c.geothermal_capacity));
        }
        c.geothermal_availability = r.number("availability", 0.9, 0.0, 1.0, true);
        r.reject_unknown();
    }
    {
        Reader r(subtable(root, "hydro", failures), "hydro", failures);
        const std::string table = r.text("table", "");
        if (!table.empty()) {
            c.hydro_table = table;
            must_exist.emplace_back(r.key("table"), c.resolve(c.hydro_table));
        }
        r.reject_unknown();
    }

    {
        Reader r(subtable(root, "optimization", failures), "optimization", failures);
        if (const auto* n = r.node("steps")) {
            const auto* a = n->as_array();
            if (!a || a->empty()) {
                r.fail("steps", "expected a non-empty array of numbers");
            } else {
                bool in_range = true;
                for (const auto& e : *a) {
                    const auto v = e.value<double>();
                    if (!v || !e.is_number()) {
                        r.fail("steps", "expected numbers");
                        in_range = false;
                        break;
                    }
                    if (!(*v > 0.0 && *v <= 1.0))
                        in_range = false;
                    c.steps.push_back(*v);
                }
                if (!in_range)
                    failures.push_back("steps must lie in (0,1]");
                else if (!std::is_sorted(c.steps.begin(), c.steps.end())
                         || std::adjacent_find(c.steps.begin(), c.steps.end()) != c.steps.end())
                    failures.push_back("steps must increase strictly");
            }
        } else {
            c.steps = h2opt::kDefaultSteps;
        }
        const double def_eff = (c.year == 2030 || c.year == 2050) ? h2opt::default_electrolyzer_efficiency(c.year) : 48.0;
        c.efficiency_kwh_per_kg = r.number("efficiency_kwh_per_kg", def_eff, h2opt::kLhvKwhPerKg, 200.0);
        c.battery = r.boolean("battery", true);
        c.battery_round_trip = r.number("battery_round_trip", 0.92, 0.0, 1.0, true);
        c.water_use_l_per_kg = r.number("water_use_l_per_kg", 10.0, 0.0, 1e3);
        r.reject_unknown();
    }
    {
        Reader r(subtable(root, "socio", failures), "socio", failures);
        c.access_weight_electricity = r.number("access_weight_electricity", 0.5, 0.0, 1.0);
        c.access_weight_clean_fuel = r.number("access_weight_clean_fuel", 0.5, 0.0, 1.0);
        if (std::fabs(c.access_weight_electricity + c.access_weight_clean_fuel - 1.0) > 1e-12)
            failures.push_back("socio: access weights must sum to 1");
        c.weight_ae = r.number("weight_ae", 1.0, 0.0, 1e6);
        c.weight_me = r.number("weight_me", 1.0, 0.0, 1e6);
        c.weight_oe = r.number("weight_oe", 1.0, 0.0, 1e6);
        if (!(c.weight_ae + c.weight_me + c.weight_oe > 0.0))
            failures.push_back("socio: composite weights must not all be zero");
        r.reject_unknown();
    }
    {
        Reader r(subtable(root, "render", failures), "render", failures);
        c.map_step = r.number("map_step", 0.25, 0.0, 1.0, true);
        c.map_classes = r.integer("map_classes", 5, 2, 12);
        if (std::find(c.steps.begin(), c.steps.end(), c.map_step) == c.steps.end())
            failures.push_back("render.map_step: must be one of the optimization steps");
        r.reject_unknown();
    }

    for (const auto& [k, p] : must_exist)
        if (!fs::exists(p))
            failures.push_back(k + ": file not found: " + p.string());

    // region ids and their weather files
    const fs::path boundaries = c.resolve(c.boundaries);
    if (!c.boundaries.empty() && fs::exists(boundaries)) {
        try {
            const auto b = geodata::load_boundaries(boundaries);
            if (b.empty())
                failures.push_back("paths.boundaries: region set must not be empty");
            std::set<std::string> known;
            for (const auto& r : b)
                known.insert(r.gid);
            for (const auto& id : c.regions)
                if (!known.count(id))
                    failures.push_back("run.regions: unknown region '" + id + "'");
            if (c.all_regions)
                c.regions.assign(known.begin(), known.end());
            std::sort(c.regions.begin(), c.regions.end());
            if (std::adjacent_find(c.regions.begin(), c.regions.end()) != c.regions.end())
                failures.push_back("run.regions: duplicate region ids");
            const fs::path wd = c.resolve(c.weather_dir);
            if (fs::is_directory(wd))
                for (const auto& id : c.regions)
                    if (known.count(id) && !fs::exists(wd / (id + ".csv")))
                        failures.push_back("paths.weather_dir: no weather file for region '" + id + "'");
        } catch (const Error& e) {
            failures.push_back(std::string("paths.boundaries: ") + e.what());
        }
    }

    // canonical effective configuration; output location and threads excluded
    toml::table eff = root;
    if (auto* t = eff.get_as<toml::table>("run")) {
        t->erase("out_dir");
        t->erase("threads");
    }
    auto section = [&](std::string_view s) -> toml::table& {
        if (!eff.get_as<toml::table>(s))
            eff.insert_or_assign(s, toml::table{});
        return *eff.get_as<toml::table>(s);
    };
    section("run").insert_or_assign("year", c.year);
    section("water").insert_or_assign("scenario", c.water_scenario);
    section("water").insert_or_assign("climate", c.climate);
    section("optimization").insert_or_assign("steps", to_array(c.steps));
    section("optimization").insert_or_assign("efficiency_kwh_per_kg", c.efficiency_kwh_per_kg);
    std::ostringstream canon;
    canon << toml::toml_formatter(eff);
    c.canonical = canon.str();
    return out;
}

} // namespace h2atlas::pipeline
