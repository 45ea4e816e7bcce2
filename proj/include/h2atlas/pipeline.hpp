#pragma once

// Configuration-driven pipeline: seven stages that exchange data only
// through files under the output directory, SVG rendering, run manifests and
// the synthetic fixture generator.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2atlas/errors.hpp"
#include "h2atlas/technology.hpp"

namespace h2atlas::pipeline {

namespace fs = std::filesystem;

struct CriterionConfig {
    std::string name;
    std::vector<Technology> technologies; ///< pv, wind and/or geothermal
    fs::path feature;                     ///< raster, non-zero cells are the feature
    double buffer_m = 0.0;
};

struct ResourceConfig {
    bool enabled = true;
    double density_mw_per_km2 = 0.0;
    fs::path resource; ///< optional per-cell multiplier on the driving weather variable
    int classes = 3;
};

struct RunConfig {
    fs::path config_path;
    fs::path base_dir; ///< relative paths resolve against this
    fs::path out_dir;
    int year = 2030;
    std::vector<std::string> regions; ///< empty with all_regions set means every boundary
    bool all_regions = false;
    int threads = 1;

    fs::path boundaries, weather_dir, countries;
    fs::path elevation, coast;
    fs::path recharge, consumption;
    fs::path electricity_access, clean_fuel_access, population_density, labor_force_density;
    fs::path biomass_dependence, poverty_headcount;

    std::vector<CriterionConfig> criteria;
    ResourceConfig pv, wind;
    double wind_shear = 0.14;
    fs::path turbine; ///< empty: synthetic default turbine
    fs::path geothermal_capacity; ///< optional raster of MW per cell
    double geothermal_availability = 0.9;
    fs::path hydro_table; ///< optional CSV gid,capacity_mw,series

    std::vector<double> steps;
    double efficiency_kwh_per_kg = 48.0;
    bool battery = true;
    double battery_round_trip = 0.92;
    double water_use_l_per_kg = 10.0;

    std::string water_scenario = "medium";
    std::string climate = "rcp26";
    double groundwater_cost_eur_per_m3 = 0.10;
    double electricity_price_eur_per_kwh = 0.05;
    double desal_base_eur_per_m3 = 0.70;
    double pipeline_capex_eur_per_m3a_km = 0.0115;
    double friction_kwh_per_m3_km = 0.004;

    double access_weight_electricity = 0.5;
    double access_weight_clean_fuel = 0.5;
    double weight_ae = 1.0, weight_me = 1.0, weight_oe = 1.0;

    double map_step = 0.25;
    int map_classes = 5;

    /// Effective configuration (file plus overrides) in canonical TOML.
    std::string canonical;

    fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
    /// Path templates may contain {climate} and {horizon}.
    fs::path resolve_template(const fs::path& p) const;
};

struct Overrides {
    std::optional<int> year;
    std::optional<std::string> water_scenario;
    std::optional<std::string> climate;
    std::optional<fs::path> out_dir;
    std::optional<int> threads;
};

struct LoadedConfig {
    RunConfig config;
    std::vector<std::string> failures; ///< every problem found, in key order
    bool ok() const noexcept { return failures.empty(); }
};

/// Reads and checks a TOML configuration: types, ranges and file existence.
/// Throws IoError when the file cannot be read and ParseError on TOML syntax
/// errors; everything else is collected into `failures`.
LoadedConfig load_config(const fs::path& path, const Overrides& overrides = {});

enum class Stage { eligibility, placement, simulation, water, optimization, setaside, socio };

inline constexpr std::array<Stage, 7> kStages{Stage::eligibility, Stage::placement,    Stage::simulation,
                                              Stage::water,       Stage::optimization, Stage::setaside,
                                              Stage::socio};

std::string_view to_string(Stage s) noexcept;
/// "01_eligibility" ... "07_socio"
std::string stage_dir_name(Stage s);

/// Raised when a stage cannot complete; its outputs are moved under failed/.
class StageFailure : public Error {
public:
    StageFailure(Stage stage, const std::string& detail)
        : Error("stage " + std::string(to_string(stage)) + " failed: " + detail), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// Runs one stage from the artifacts of the upstream stages.
void run_stage(const RunConfig& config, Stage stage);

/// Re-renders every SVG from stage artifacts that are present.
void render_report(const RunConfig& config);

struct ManifestEntry {
    std::string path; ///< relative to the output directory
    std::string sha256;
};

struct Manifest {
    std::string config_sha256;
    std::vector<std::pair<std::string, std::string>> stages; ///< stage dir, combined hash
    std::vector<ManifestEntry> files;
};

/// Hashes all stage outputs and writes manifest.json.
Manifest write_manifest(const RunConfig& config);

/// All stages in order, then the report and the manifest.
Manifest run_pipeline(const RunConfig& config);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

struct FixtureOptions {
    std::uint64_t seed = 42;
    std::size_t weather_years = 3;
};

/// Writes the 12-region synthetic dataset and a config.toml next to it.
/// Identical seeds give identical bytes.
void generate_fixture(const fs::path& dir, const FixtureOptions& options = {});

} // namespace h2atlas::pipeline
