#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "internal.hpp"
#include "h2atlas/res_sim.hpp"

namespace h2atlas::pipeline {

namespace {

using geodata::RasterGrid;

constexpr std::size_t kCols = 48, kRows = 40, kLandRows = 36, kBlock = 12;
constexpr double kCell = 0.25, kLon0 = 0.0, kLat0 = 4.0;
const char* const kCountries[] = {"XAA", "XAB", "XAC"};

// Platform-independent variates on top of mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double normal()
    {
        const double u1 = 1.0 - uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
};

geodata::GridGeometry grid()
{
    return {kCols, kRows, kLon0, kLat0, kCell};
}

bool land(std::size_t row)
{
    return row < kLandRows;
}

std::string gid_of(std::size_t b)
{
    return std::string(kCountries[b / 4]) + "." + std::to_string(b % 4 + 1) + "_1";
}

// Climate of a block: the northern country is windy and sunny, the southern
// one calm with a weaker sun.
struct BlockClimate {
    double wind_mean, wind_diurnal, ghi_scale, temp_mean;
};

BlockClimate climate_of(std::size_t b)
{
    const double north = 1.0 - static_cast<double>(b / 4) / 2.0; // 1, 0.5, 0
    const double east = static_cast<double>(b % 4) / 3.0;
    return {4.8 + 4.2 * north - 0.5 * east, 0.5 + 1.0 * north, 0.88 + 0.10 * north + 0.02 * east,
            24.0 + 6.0 * north};
}

RasterGrid field(const std::function<double(std::size_t, std::size_t)>& f, bool land_only = true)
{
    RasterGrid g(grid(), RasterGrid::kDefaultNodata, 0.0);
    for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t c = 0; c < kCols; ++c)
            g.at(r, c) = (!land_only || land(r)) ? f(r, c) : RasterGrid::kDefaultNodata;
    return g;
}

double round_to(double v, int digits)
{
    const double s = std::pow(10.0, digits);
    return std::round(v * s) / s;
}

std::string weather_csv(std::size_t b, std::size_t years, Rng& rng)
{
    const BlockClimate cl = climate_of(b);
    const double lat = kLat0 + (kLandRows - (b / 4) * kBlock - kBlock / 2.0) * kCell;
    std::string out = "hour_index,ghi,temp_c,wind_ms\n";
    double cloud = 0.0, gust = 0.0;
    const std::size_t hours = years * res_sim::kHoursPerYear;
    for (std::size_t t = 0; t < hours; ++t) {
        const double doy = static_cast<double>((t / 24) % 365);
        const double hour = static_cast<double>(t % 24) + 0.5;
        const double decl = 23.44 * std::sin(2.0 * std::numbers::pi * (284.0 + doy) / 365.0) * std::numbers::pi / 180.0;
        const double phi = lat * std::numbers::pi / 180.0;
        const double ha = (hour - 12.0) * 15.0 * std::numbers::pi / 180.0;
        const double cosz = std::sin(phi) * std::sin(decl) + std::cos(phi) * std::cos(decl) * std::cos(ha);
        cloud = 0.92 * cloud + 0.39 * rng.normal();
        const double clear = std::max(0.0, 1050.0 * cosz);
        const double attenuation = std::clamp(cl.ghi_scale - 0.12 * std::fabs(cloud), 0.15, 1.0);
        const double ghi = clear * attenuation;
        const double temp = cl.temp_mean + 5.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0)
            + 3.0 * std::sin(2.0 * std::numbers::pi * (doy - 100.0) / 365.0);
        gust = 0.95 * gust + 0.31 * rng.normal();
        const double seasonal = 1.0 + 0.15 * std::cos(2.0 * std::numbers::pi * (doy - 20.0) / 365.0);
        const double wind = std::max(
            0.0, cl.wind_mean * seasonal + cl.wind_diurnal * std::cos(2.0 * std::numbers::pi * hour / 24.0)
                     + 1.2 * gust);
        out += std::to_string(t) + "," + format_fixed(ghi, 1) + "," + format_fixed(temp, 1) + ","
            + format_fixed(wind, 2) + "\n";
    }
    return out;
}

std::string boundaries_geojson()
{
    std::ostringstream s;
    s << "{\"type\":\"FeatureCollection\",\"features\":[\n";
    const std::size_t blocks = (kLandRows / kBlock) * (kCols / kBlock);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double west = kLon0 + static_cast<double>((b % 4) * kBlock) * kCell;
        const double east = west + kBlock * kCell;
        const double north = kLat0 + static_cast<double>(kRows - (b / 4) * kBlock) * kCell;
        const double south = north - kBlock * kCell;
        auto pt = [&](double x, double y) { return "[" + format_number(x) + "," + format_number(y) + "]"; };
        s << "{\"type\":\"Feature\",\"properties\":{\"gid\":\"" << gid_of(b) << "\",\"country\":\""
          << kCountries[b / 4] << "\"},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[" << pt(west, south)
          << "," << pt(east, south) << "," << pt(east, north) << "," << pt(west, north) << "," << pt(west, south)
          << "]]}}" << (b + 1 < blocks ? "," : "") << "\n";
    }
    s << "]}\n";
    return s.str();
}

const char* kConfig = R"(# Synthetic 12-region study: three countries on a 48 x 40 grid of 0.25 degree cells.

[run]
year = 2030
regions = "all"
out_dir = "out"
threads = 1

[paths]
boundaries = "boundaries.geojson"
weather_dir = "weather"
countries = "countries.csv"
elevation = "rasters/elevation.asc"
coast = "rasters/ocean.asc"
recharge = "rasters/recharge_{climate}_{horizon}.asc"
consumption = "rasters/consumption_{horizon}.asc"
electricity_access = "rasters/electricity_access.asc"
clean_fuel_access = "rasters/clean_fuel_access.asc"
population_density = "rasters/population_density.asc"
labor_force_density = "rasters/labor_force_density.asc"
biomass_dependence = "rasters/biomass_dependence.asc"
poverty_headcount = "rasters/poverty_headcount.asc"

[[criteria]]
name = "settlements"
technologies = "all"
feature = "rasters/settlements.asc"
buffer_m = 30000.0      # surrogate default

[[criteria]]
name = "protected_areas"
technologies = "all"
feature = "rasters/protected.asc"
buffer_m = 0.0

[[criteria]]
name = "roads"
technologies = ["wind"]
feature = "rasters/roads.asc"
buffer_m = 20000.0      # surrogate default

[[criteria]]
name = "water_bodies"
technologies = ["pv", "wind"]
feature = "rasters/water_bodies.asc"
buffer_m = 0.0

[pv]
density_mw_per_km2 = 50.0   # surrogate default
resource = "rasters/pv_resource.asc"
classes = 3

[wind]
density_mw_per_km2 = 7.5    # surrogate default
resource = "rasters/wind_resource.asc"
classes = 3
shear_exponent = 0.14       # surrogate default

[geothermal]
capacity = "rasters/geothermal_mw.asc"
availability = 0.9          # surrogate default

[hydro]
table = "hydro.csv"

[optimization]
steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00]
efficiency_kwh_per_kg = 48.0    # surrogate default
battery = true
battery_round_trip = 0.92
water_use_l_per_kg = 10.0

[water]
scenario = "medium"
climate = "rcp26"
groundwater_cost_eur_per_m3 = 0.10      # surrogate default
electricity_price_eur_per_kwh = 0.05    # surrogate default
desal_base_eur_per_m3 = 0.70
pipeline_capex_eur_per_m3a_km = 0.0115  # surrogate default
friction_kwh_per_m3_km = 0.004          # surrogate default

[socio]
access_weight_electricity = 0.5   # surrogate default
access_weight_clean_fuel = 0.5    # surrogate default
weight_ae = 1.0                   # surrogate default
weight_me = 1.0                   # surrogate default
weight_oe = 1.0                   # surrogate default

[render]
map_step = 0.25
map_classes = 5
)";

} // namespace

void generate_fixture(const fs::path& dir, const FixtureOptions& o)
{
    if (o.weather_years < 1)
        throw ValidationError("fixture needs at least one weather year");
    Rng rng(o.seed);
    fs::create_directories(dir / "rasters");
    fs::create_directories(dir / "weather");
    fs::create_directories(dir / "hydro");
    auto save = [&](const RasterGrid& g, const std::string& name) { geodata::save_raster(g, dir / "rasters" / name); };

    write_text(dir / "boundaries.geojson", boundaries_geojson());

    // terrain and coast
    std::vector<double> relief(kRows * kCols);
    for (double& v : relief)
        v = rng.uniform();
    save(field([&](std::size_t r, std::size_t c) {
             return round_to(150.0 + 22.0 * static_cast<double>(kLandRows - r) + 120.0 * relief[r * kCols + c], 1);
         }),
         "elevation.asc");
    save(field([](std::size_t r, std::size_t) { return land(r) ? 0.0 : 1.0; }, false), "ocean.asc");

    // exclusion features
    auto sparse = [&](double p) {
        return field([&](std::size_t, std::size_t) { return rng.uniform() < p ? 1.0 : 0.0; });
    };
    save(sparse(0.015), "settlements.asc");
    save(sparse(0.010), "water_bodies.asc");
    const std::size_t road_row = 10 + static_cast<std::size_t>(rng.uniform() * 16.0);
    const std::size_t road_col = 8 + static_cast<std::size_t>(rng.uniform() * 32.0);
    save(field([&](std::size_t r, std::size_t c) { return (r == road_row || c == road_col) ? 1.0 : 0.0; }),
         "roads.asc");
    const double pr = 6.0 + rng.uniform() * 24.0, pc = 6.0 + rng.uniform() * 36.0;
    save(field([&](std::size_t r, std::size_t c) {
             const double dr = static_cast<double>(r) - pr, dc = static_cast<double>(c) - pc;
             return dr * dr + dc * dc <= 9.0 ? 1.0 : 0.0;
         }),
         "protected.asc");

    // resource multipliers on the regional weather
    save(field([&](std::size_t r, std::size_t c) {
             return round_to(0.93 + 0.10 * static_cast<double>(kLandRows - r) / kLandRows
                                 + 0.03 * static_cast<double>(c % kBlock) / kBlock + 0.02 * rng.uniform(),
                             4);
         }),
         "pv_resource.asc");
    save(field([&](std::size_t r, std::size_t c) {
             const double ridge = std::exp(-std::pow((static_cast<double>(c % kBlock) - 3.0) / 3.0, 2.0));
             return round_to(0.85 + 0.30 * ridge + 0.05 * static_cast<double>(r % kBlock) / kBlock
                                 + 0.04 * rng.uniform(),
                             4);
         }),
         "wind_resource.asc");
    // rift cells with geothermal capacity in one eastern region
    save(field([](std::size_t r, std::size_t c) { return (r >= 14 && r <= 19 && c == 45) ? 40.0 : 0.0; }),
         "geothermal_mw.asc");

    // groundwater
    for (int horizon : {2030, 2050})
        for (const char* climate : {"rcp26", "rcp85"}) {
            const double shift = (horizon == 2050 ? -0.08 : 0.0) + (std::string(climate) == "rcp85" ? -0.05 : 0.0);
            save(field([&](std::size_t r, std::size_t c) {
                     const double south = static_cast<double>(r) / kLandRows;
                     return round_to((8.0 + 380.0 * south * south) * (1.0 + shift) * (0.9 + 0.2 * relief[r * kCols + c]),
                                     2);
                 }),
                 std::string("recharge_") + climate + "_" + std::to_string(horizon) + ".asc");
        }
    for (int horizon : {2030, 2050})
        save(field([&](std::size_t r, std::size_t c) {
                 return round_to((horizon == 2050 ? 1.2 : 1.0) * (2.0 + 30.0 * static_cast<double>(r) / kLandRows)
                                     * relief[(kRows - 1 - r) * kCols + c],
                                 2);
             }),
             "consumption_" + std::to_string(horizon) + ".asc");

    // socio-economic layers
    save(field([&](std::size_t, std::size_t c) {
             return round_to(std::clamp(0.25 + 0.5 * static_cast<double>(c) / kCols + 0.1 * rng.uniform(), 0.0, 1.0), 3);
         }),
         "electricity_access.asc");
    save(field([&](std::size_t, std::size_t c) {
             return round_to(std::clamp(0.05 + 0.4 * static_cast<double>(c) / kCols + 0.1 * rng.uniform(), 0.0, 1.0), 3);
         }),
         "clean_fuel_access.asc");
    std::vector<double> pop(kRows * kCols);
    for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t c = 0; c < kCols; ++c)
            pop[r * kCols + c] = round_to(std::exp(1.0 + 3.5 * static_cast<double>(r) / kLandRows + rng.normal() * 0.6), 2);
    save(field([&](std::size_t r, std::size_t c) { return pop[r * kCols + c]; }), "population_density.asc");
    save(field([&](std::size_t r, std::size_t c) { return round_to(0.45 * pop[r * kCols + c], 2); }),
         "labor_force_density.asc");
    save(field([&](std::size_t r, std::size_t) {
             return round_to(std::clamp(0.3 + 0.5 * static_cast<double>(r) / kLandRows + 0.1 * rng.uniform(), 0.0, 1.0), 3);
         }),
         "biomass_dependence.asc");
    save(field([&](std::size_t r, std::size_t c) {
             return round_to(std::clamp(0.2 + 0.3 * static_cast<double>(r) / kLandRows
                                            + 0.2 * static_cast<double>(kCols - c) / kCols + 0.1 * rng.uniform(),
                                        0.0, 1.0),
                             3);
         }),
         "poverty_headcount.asc");

    write_text(dir / "countries.csv",
               "iso3,unemployment_rate,employment_factor,electricity_demand_twh,h2_demand_twh\n"
               "XAA,0.098,5.9,12.5,1.5\n"
               "XAB,0.128,4.2,30.0,2.0\n"
               "XAC,0.046,3.1,55.0,4.0\n");

    // hydropower: one southern region with a semi-monthly series
    {
        std::string s = "hour,cf\n";
        const std::size_t samples = o.weather_years * 24;
        for (std::size_t m = 0; m < samples; ++m) {
            const double hour = (static_cast<double>(m) + 0.5) * res_sim::kHoursPerYear / 24.0;
            const double cf = 0.45 + 0.3 * std::sin(2.0 * std::numbers::pi * (static_cast<double>(m % 24) - 6.0) / 24.0)
                + 0.05 * rng.uniform();
            s += format_fixed(hour, 1) + "," + format_fixed(std::clamp(cf, 0.0, 1.0), 4) + "\n";
        }
        write_text(dir / "hydro" / "XAC.2_1.csv", s);
        write_text(dir / "hydro.csv", "gid,capacity_mw,series\nXAC.2_1,250,hydro/XAC.2_1.csv\n");
    }

    const std::size_t blocks = (kLandRows / kBlock) * (kCols / kBlock);
    for (std::size_t b = 0; b < blocks; ++b)
        write_text(dir / "weather" / (gid_of(b) + ".csv"), weather_csv(b, o.weather_years, rng));

    write_text(dir / "config.toml", kConfig);
}

} // namespace h2atlas::pipeline
