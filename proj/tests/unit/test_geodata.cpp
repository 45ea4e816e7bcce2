#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iterator>
#include <random>

#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/geodata.hpp"
#include "oracles.hpp"

using namespace h2atlas;
using namespace h2atlas::geodata;

namespace {

GridGeometry geom(std::size_t cols, std::size_t rows, double lon, double lat, double cs)
{
    GridGeometry g;
    g.n_cols = cols;
    g.n_rows = rows;
    g.origin_lon = lon;
    g.origin_lat = lat;
    g.cell_size = cs;
    return g;
}

std::filesystem::path temp_path(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "h2atlas_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string square(const std::string& gid, double x0, double y0, double x1, double y1)
{
    auto f = [](double v) { return format_number(v); };
    return R"({"type":"Feature","properties":{"gid":")" + gid + R"(","country":"XAA"},)"
        R"("geometry":{"type":"Polygon","coordinates":[[[)" + f(x0) + "," + f(y0) + "],[" + f(x1) + "," + f(y0)
        + "],[" + f(x1) + "," + f(y1) + "],[" + f(x0) + "," + f(y1) + "],[" + f(x0) + "," + f(y0) + "]]]}}";
}

std::string collection(const std::vector<std::string>& features)
{
    std::string s = R"({"type":"FeatureCollection","features":[)";
    for (std::size_t i = 0; i < features.size(); ++i)
        s += (i ? "," : "") + features[i];
    return s + "]}";
}

} // namespace

TEST_CASE("esri ascii transcription with nodata")
{
    const auto g = parse_esri_ascii("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n3 -9999\n");
    CHECK(g.geometry().n_cols == 2);
    CHECK(g.geometry().n_rows == 1);
    CHECK(g[0] == 3.0);
    CHECK(g.is_nodata(1));
    CHECK_FALSE(g.is_nodata(0));
}

TEST_CASE("esri ascii errors name the line or the structure")
{
    SUBCASE("malformed header")
    {
        try {
            parse_esri_ascii("ncols 2\nnrows x\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("cell count mismatch")
    {
        CHECK_THROWS_AS(parse_esri_ascii("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n"),
                        StructuralError);
    }
}

TEST_CASE("save(load(x)) keeps every number and header field")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    RasterGrid g(geom(7, 5, -3.125, 11.5, 0.0625), -9999.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = i % 6 == 0 ? -9999.0 : u(rng);
    for (auto fmt : {RasterFormat::esri_ascii, RasterFormat::flat_binary}) {
        const auto p = temp_path(fmt == RasterFormat::esri_ascii ? "rt.asc" : "rt.h2ar");
        save_raster(g, p, fmt);
        const auto back = load_raster(p, fmt);
        CHECK(back.geometry() == g.geometry());
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(back.is_nodata(i) == g.is_nodata(i));
            if (!g.is_nodata(i))
                CHECK(back[i] == g[i]);
        }
        save_raster(back, temp_path("rt2.asc"), RasterFormat::esri_ascii);
        save_raster(g, temp_path("rt1.asc"), RasterFormat::esri_ascii);
        CHECK(read_text(temp_path("rt1.asc")) == read_text(temp_path("rt2.asc")));
    }
}

TEST_CASE("flat binary header is 36 bytes and nodata is NaN on disk")
{
    RasterGrid g(geom(3, 2, 1.0, 2.0, 0.5), -1.0, 4.0);
    g[2] = -1.0;
    const auto bytes = encode_flat_binary(g);
    CHECK(bytes.size() == kFlatBinaryHeaderBytes + 6 * 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "H2AR");
    double stored = 0.0;
    std::memcpy(&stored, bytes.data() + kFlatBinaryHeaderBytes + 2 * 8, 8);
    CHECK(std::isnan(stored));
    const auto back = decode_flat_binary(bytes, -1.0);
    CHECK(back.is_nodata(2));
    CHECK(back[0] == 4.0);
}

TEST_CASE("100x100 random raster sums to the harness-recorded total")
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> u(-1000, 1000);
    RasterGrid g(geom(100, 100, 0, 0, 0.01));
    long long recorded = 0; // integer-valued cells make the harness sum exact
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int v = u(rng);
        g[i] = v;
        recorded += v;
    }
    const auto p = temp_path("sum.asc");
    save_raster(g, p);
    CHECK(load_raster(p).valid_sum() == static_cast<double>(recorded));
}

TEST_CASE("cell area closed form and latitude monotonicity")
{
    const double a = CellAreaModel::cell_area_m2(0.0, 0.01);
    CHECK(std::fabs(a - 111320.0 * 110540.0 * 1e-4) <= 1e-9 * a);
    double prev = a;
    for (double lat = 5.0; lat < 85.0; lat += 5.0) {
        const double x = CellAreaModel::cell_area_m2(lat, 0.01);
        CHECK(x < prev);
        CHECK(CellAreaModel::cell_area_m2(-lat, 0.01) == doctest::Approx(x).epsilon(1e-12));
        prev = x;
    }
}

TEST_CASE("region invariants")
{
    const auto g = geom(10, 10, 0, 0, 0.1);
    const auto r = make_region("XAA.1_1", "XAA", g, {0, 1, 2, 11});
    CHECK(r.area_km2 == doctest::Approx(mask_area_km2(g, r.mask)).epsilon(1e-12));
    r.validate();
    Region bad = r;
    bad.area_km2 *= 1.01;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("rasterize_regions")
{
    SUBCASE("unit square over a 2x2 grid")
    {
        const auto b = parse_boundaries(collection({square("A", -0.5, -0.5, 2.5, 2.5)}));
        const auto rr = rasterize_regions(b, geom(2, 2, 0, 0, 1.0));
        CHECK(rr.regions.at(0).mask.size() == 4);
        CHECK(rr.warnings.empty());
    }
    SUBCASE("two disjoint squares equal the point-in-polygon oracle")
    {
        const auto g = geom(20, 16, 10.0, -3.0, 0.25);
        const auto b = parse_boundaries(collection({square("A", 10.3, -2.6, 11.9, -0.4), square("B", 12.2, -1.1, 14.7, 0.9)}));
        const auto rr = rasterize_regions(b, g);
        std::vector<int> oracle(g.size(), -1);
        const double boxes[2][4] = {{10.3, -2.6, 11.9, -0.4}, {12.2, -1.1, 14.7, 0.9}};
        for (std::size_t r = 0; r < g.n_rows; ++r)
            for (std::size_t c = 0; c < g.n_cols; ++c) {
                const double lon = 10.0 + (c + 0.5) * 0.25, lat = -3.0 + (g.n_rows - r - 0.5) * 0.25;
                for (int k = 0; k < 2; ++k)
                    if (lon > boxes[k][0] && lon < boxes[k][2] && lat > boxes[k][1] && lat < boxes[k][3])
                        oracle[r * g.n_cols + c] = k;
            }
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(rr.cell_region[i] == oracle[i]);
        std::vector<std::size_t> both;
        std::set_intersection(rr.regions[0].mask.begin(), rr.regions[0].mask.end(), rr.regions[1].mask.begin(),
                              rr.regions[1].mask.end(), std::back_inserter(both));
        CHECK(both.empty());
    }
    SUBCASE("polygon covering no cell center is kept with a warning")
    {
        const auto b = parse_boundaries(collection({square("tiny", 0.1, 0.1, 0.2, 0.2)}));
        const auto rr = rasterize_regions(b, geom(4, 4, 0, 0, 1.0));
        REQUIRE(rr.regions.size() == 1);
        CHECK(rr.regions[0].mask.empty());
        CHECK(rr.regions[0].area_km2 > 0.0);
        CHECK(rr.warnings.size() == 1);
    }
    SUBCASE("invalid ring raises a geometry error naming the polygon")
    {
        const std::string bad = R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"gid":"B1","country":"XAA"},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,1],[0,0]]]}}]})";
        try {
            parse_boundaries(bad);
            FAIL("expected GeometryError");
        } catch (const GeometryError& e) {
            CHECK(e.feature_id() == "B1");
        }
    }
}

TEST_CASE("distance transform")
{
    SUBCASE("self distance and closed-form neighbour")
    {
        const auto g = geom(3, 1, 0, -0.005, 0.01);
        MaskGrid m(g);
        m.set(0, 0, true);
        const auto d = distance_to_feature(m);
        CHECK(d.at(0, 0) == 0.0);
        CHECK(d.at(0, 1) == doctest::Approx(1113.2).epsilon(1e-9));
    }
    SUBCASE("empty mask is +inf everywhere")
    {
        const auto d = distance_to_feature(MaskGrid(geom(4, 3, 0, 0, 0.1)));
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(std::isinf(d[i]));
    }
    SUBCASE("20x20 random masks equal the all-pairs oracle exactly")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 6; ++trial) {
            const auto g = geom(20, 20, 3.0, -40.0 + 30.0 * trial, 0.05 + 0.1 * u(rng));
            MaskGrid m(g);
            std::vector<std::uint8_t> raw(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                raw[i] = u(rng) < 0.04 ? 1 : 0;
                m.set(i, raw[i] != 0);
            }
            const auto d = distance_to_feature(m);
            const auto o = testsupport::brute_force_distance({g.n_cols, g.n_rows, g.origin_lat, g.cell_size}, raw);
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK(d[i] == o[i]);
        }
    }
    SUBCASE("superset masks never increase distances")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto g = geom(25, 18, 0, 10, 0.1);
        MaskGrid a(g), b(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = u(rng);
            a.set(i, x < 0.03);
            b.set(i, x < 0.08);
        }
        const auto da = distance_to_feature(a), db = distance_to_feature(b);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(db[i] <= da[i]);
    }
    SUBCASE("mirroring rows about the equator leaves distances unchanged")
    {
        // latitude relabelling r -> n-1-r on a grid centred on the equator
        const auto g = geom(9, 10, 0, -0.5, 0.1);
        MaskGrid a(g), b(g);
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 9; ++c) {
                const bool v = u(rng) < 0.1;
                a.set(r, c, v);
                b.set(9 - r, c, v);
            }
        const auto da = distance_to_feature(a), db = distance_to_feature(b);
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 9; ++c)
                CHECK(da.at(r, c) == doctest::Approx(db.at(9 - r, c)).epsilon(1e-12));
    }
}

TEST_CASE("alignment and validation")
{
    CHECK_THROWS_AS(require_aligned(geom(2, 2, 0, 0, 1), geom(2, 3, 0, 0, 1), "x"), AlignmentError);
    CHECK_THROWS_AS(geom(0, 2, 0, 0, 1).validate(), ValidationError);
    CHECK_THROWS_AS(geom(2, 2, 0, 0, -1).validate(), ValidationError);
}
