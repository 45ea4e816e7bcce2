#include <chrono>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "h2atlas/pipeline.hpp"

namespace pl = h2atlas::pipeline;

namespace {

constexpr int kOk = 0, kValidation = 2, kStageFailure = 3;

struct Globals {
    std::string config;
    std::string out;
    std::optional<int> year;
    std::optional<std::string> water_scenario;
    std::optional<std::string> climate;
    std::optional<int> threads;
    std::uint64_t seed = 42;
};

std::optional<pl::LoadedConfig> load(const Globals& g)
{
    if (g.config.empty()) {
        std::cerr << "error: --config is required\n";
        return std::nullopt;
    }
    pl::Overrides o;
    o.year = g.year;
    o.water_scenario = g.water_scenario;
    o.climate = g.climate;
    o.threads = g.threads;
    if (!g.out.empty())
        o.out_dir = g.out;
    auto loaded = pl::load_config(g.config, o);
    for (const auto& f : loaded.failures)
        std::cerr << "invalid: " << f << "\n";
    return loaded;
}

int run_stages(const pl::RunConfig& c, std::initializer_list<pl::Stage> stages)
{
    for (pl::Stage s : stages) {
        const auto t0 = std::chrono::steady_clock::now();
        pl::run_stage(c, s);
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << pl::stage_dir_name(s) << " done in " << dt << " s\n";
    }
    pl::write_manifest(c);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Green-hydrogen cost-potential pipeline"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "pipeline configuration (TOML)");
    app.add_option("--out", g.out, "output directory (overrides run.out_dir)");
    app.add_option("--year", g.year, "techno-economic year")->check(CLI::IsMember({2030, 2050}));
    app.add_option("--water-scenario", g.water_scenario, "groundwater yield scenario")
        ->check(CLI::IsMember({"conservative", "medium", "extreme"}));
    app.add_option("--climate", g.climate, "climate scenario")->check(CLI::IsMember({"rcp26", "rcp85"}));
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "fixture seed (generate-fixture only)");

    struct Command {
        const char* name;
        const char* help;
        std::vector<pl::Stage> stages;
    };
    const std::vector<Command> stage_commands{
        {"eligibility", "land eligibility and capacity placement", {pl::Stage::eligibility, pl::Stage::placement}},
        {"simulate", "hourly generation profiles", {pl::Stage::simulation}},
        {"water", "groundwater yield and desalination cost", {pl::Stage::water}},
        {"optimize", "per-region hydrogen system optimization", {pl::Stage::optimization}},
        {"curves", "national cost-potential curves and demand set-aside", {pl::Stage::setaside}},
        {"socio", "socio-economic indicators", {pl::Stage::socio}},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : stage_commands)
        subs.push_back(app.add_subcommand(c.name, c.help)->fallthrough());
    auto* validate = app.add_subcommand("validate", "check a configuration and list every problem")->fallthrough();
    auto* report = app.add_subcommand("report", "re-render maps and curves and rewrite the manifest")->fallthrough();
    auto* run = app.add_subcommand("run", "full pipeline")->fallthrough();
    auto* fixture = app.add_subcommand("generate-fixture", "write the 12-region synthetic dataset")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (fixture->parsed()) {
            if (g.out.empty()) {
                std::cerr << "error: generate-fixture needs --out DIR\n";
                return kValidation;
            }
            pl::generate_fixture(g.out, {g.seed});
            std::cout << "fixture written to " << g.out << "\n";
            return kOk;
        }
        const auto loaded = load(g);
        if (!loaded || !loaded->ok())
            return kValidation;
        const pl::RunConfig& c = loaded->config;
        if (validate->parsed()) {
            std::cout << "configuration ok: " << c.regions.size() << " regions\n";
            return kOk;
        }
        if (report->parsed()) {
            pl::render_report(c);
            pl::write_manifest(c);
            return kOk;
        }
        if (run->parsed()) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto m = pl::run_pipeline(c);
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "config " << m.config_sha256 << "\n";
            for (const auto& [dir, hash] : m.stages)
                std::cout << dir << " " << hash << "\n";
            std::cerr << "pipeline finished in " << dt << " s\n";
            return kOk;
        }
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) {
                for (pl::Stage s : stage_commands[i].stages)
                    run_stages(c, {s});
                return kOk;
            }
    } catch (const pl::StageFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kStageFailure;
    } catch (const h2atlas::ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kValidation;
    } catch (const h2atlas::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
