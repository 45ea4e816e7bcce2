#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "h2atlas/pipeline.hpp"

using namespace h2atlas;
namespace pl = h2atlas::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void replace_in(const fs::path& p, const std::string& from, const std::string& to)
{
    std::string text = slurp(p);
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), to);
    std::ofstream(p, std::ios::binary) << text;
}

// one fixture per process, copied per test case so edits stay local
const fs::path& pristine_fixture()
{
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("h2atlas_unit_fixture_" + std::to_string(::getpid()));
        fs::remove_all(d);
        pl::generate_fixture(d);
        return d;
    }();
    return dir;
}

fs::path fresh_copy(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("h2atlas_unit_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::copy(pristine_fixture(), d, fs::copy_options::recursive);
    return d;
}

bool mentions(const std::vector<std::string>& failures, const std::string& needle)
{
    for (const auto& f : failures)
        if (f.find(needle) != std::string::npos)
            return true;
    return false;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(H2ATLAS_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("fixture configuration loads cleanly")
{
    const auto loaded = pl::load_config(pristine_fixture() / "config.toml");
    for (const auto& f : loaded.failures)
        INFO(f);
    CHECK(loaded.ok());
    CHECK(loaded.config.regions.size() == 12);
    CHECK(loaded.config.steps.size() == 7);
}

TEST_CASE("fixture bytes depend only on the seed")
{
    const fs::path a = fs::temp_directory_path() / ("h2atlas_unit_seed_" + std::to_string(::getpid()));
    fs::remove_all(a);
    pl::generate_fixture(a);
    CHECK(slurp(a / "config.toml") == slurp(pristine_fixture() / "config.toml"));
    CHECK(slurp(a / "boundaries.geojson") == slurp(pristine_fixture() / "boundaries.geojson"));
    CHECK(slurp(a / "rasters" / "recharge_rcp26_2030.asc") == slurp(pristine_fixture() / "rasters" / "recharge_rcp26_2030.asc"));
    fs::remove_all(a);
}

TEST_CASE("configuration failures are collected")
{
    const fs::path d = fresh_copy("badcfg");
    SUBCASE("missing raster names its key")
    {
        fs::remove(d / "rasters" / "electricity_access.asc");
        const auto loaded = pl::load_config(d / "config.toml");
        CHECK_FALSE(loaded.ok());
        CHECK(mentions(loaded.failures, "electricity_access"));
    }
    SUBCASE("step outside (0,1]")
    {
        replace_in(d / "config.toml", "steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00]", "steps = [1.5]");
        const auto loaded = pl::load_config(d / "config.toml");
        CHECK(mentions(loaded.failures, "steps must lie in (0,1]"));
    }
    SUBCASE("several problems at once")
    {
        replace_in(d / "config.toml", "steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00]", "steps = [1.5]");
        fs::remove(d / "boundaries.geojson");
        const auto loaded = pl::load_config(d / "config.toml");
        CHECK(loaded.failures.size() >= 2);
    }
    SUBCASE("empty region list")
    {
        replace_in(d / "config.toml", "regions = \"all\"", "regions = []");
        CHECK_FALSE(pl::load_config(d / "config.toml").ok());
    }
    SUBCASE("overrides apply")
    {
        pl::Overrides o;
        o.year = 2050;
        o.water_scenario = "extreme";
        const auto loaded = pl::load_config(d / "config.toml", o);
        CHECK(loaded.ok());
        CHECK(loaded.config.year == 2050);
        CHECK(loaded.config.water_scenario == "extreme");
    }
    SUBCASE("unreadable file")
    {
        CHECK_THROWS_AS(pl::load_config(d / "nope.toml"), IoError);
    }
    fs::remove_all(d);
}

TEST_CASE("stages need their upstream artifacts")
{
    const fs::path d = fresh_copy("stages");
    auto loaded = pl::load_config(d / "config.toml");
    REQUIRE(loaded.ok());
    CHECK_THROWS_AS(pl::run_stage(loaded.config, pl::Stage::optimization), pl::StageFailure);

    pl::run_stage(loaded.config, pl::Stage::eligibility);
    CHECK(fs::exists(loaded.config.out_dir / pl::stage_dir_name(pl::Stage::eligibility)));
    const auto first = slurp(loaded.config.out_dir / pl::stage_dir_name(pl::Stage::eligibility) / "eligibility.csv");
    pl::run_stage(loaded.config, pl::Stage::eligibility);
    CHECK(slurp(loaded.config.out_dir / pl::stage_dir_name(pl::Stage::eligibility) / "eligibility.csv") == first);
    fs::remove_all(d);
}

TEST_CASE("hashing")
{
    CHECK(pl::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(pl::stage_dir_name(pl::Stage::eligibility) == "01_eligibility");
    CHECK(pl::stage_dir_name(pl::Stage::socio) == "07_socio");
}

TEST_CASE("command-line exit codes")
{
    const fs::path d = fresh_copy("cli");
    CHECK(run_cli("validate --config " + (d / "config.toml").string()) == 0);
    CHECK(run_cli("validate") == 2);
    CHECK(run_cli("validate --config " + (d / "config.toml").string() + " --year 2040") == 2);
    CHECK(run_cli("optimize --config " + (d / "config.toml").string()) == 3);
    replace_in(d / "config.toml", "steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00]", "steps = [1.5]");
    CHECK(run_cli("validate --config " + (d / "config.toml").string()) == 2);
    CHECK(run_cli("no-such-command") == 2);
    fs::remove_all(d);
}
