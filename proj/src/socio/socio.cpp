#include "h2atlas/socio.hpp"

#include <algorithm>
#include <cmath>

#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::socio {

namespace {

using geodata::RasterGrid;

void check_layer(const RasterGrid& g, const RasterGrid& ref, const char* name, double lo, double hi)
{
    geodata::require_aligned(ref.geometry(), g.geometry(), name);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_nodata(i))
            continue;
        if (!(g[i] >= lo && g[i] <= hi))
            throw InputError(std::string(name) + " out of range at cell " + std::to_string(i) + ": "
                             + format_number(g[i]));
    }
}

bool any_nodata(std::size_t i, std::initializer_list<const RasterGrid*> layers)
{
    for (const auto* l : layers)
        if (l->is_nodata(i))
            return true;
    return false;
}

RasterGrid blank_like(const RasterGrid& g)
{
    return RasterGrid(g.geometry(), RasterGrid::kDefaultNodata, 0.0);
}

} // namespace

void SocioInputs::validate() const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto& ref = population_density;
    ref.geometry().validate();
    check_layer(electricity_access, ref, "electricity access", 0.0, 1.0);
    check_layer(clean_fuel_access, ref, "clean fuel access", 0.0, 1.0);
    check_layer(population_density, ref, "population density", 0.0, inf);
    check_layer(unemployment_rate, ref, "unemployment rate", 0.0, 1.0);
    check_layer(labor_force_density, ref, "labor force density", 0.0, inf);
    check_layer(employment_factor, ref, "employment factor", 0.0, inf);
    check_layer(biomass_dependence, ref, "biomass dependence", 0.0, 1.0);
    check_layer(poverty_headcount, ref, "poverty headcount", 0.0, 1.0);
}

RasterGrid broadcast_country_values(const geodata::GridGeometry& grid, std::span<const geodata::Region> regions,
                                    const std::map<std::string, double>& by_iso3)
{
    RasterGrid out(grid, RasterGrid::kDefaultNodata, RasterGrid::kDefaultNodata);
    for (const auto& r : regions) {
        geodata::require_aligned(grid, r.grid, "region " + r.id);
        const auto it = by_iso3.find(r.country_code);
        if (it == by_iso3.end())
            continue;
        for (std::size_t idx : r.mask)
            out[idx] = it->second;
    }
    return out;
}

RasterGrid energy_access_indicator(const SocioInputs& in, const AccessWeights& w)
{
    in.validate();
    if (!(w.electricity >= 0.0) || !(w.clean_fuel >= 0.0) || std::fabs(w.electricity + w.clean_fuel - 1.0) > 1e-12)
        throw ValidationError("access weights must be >= 0 and sum to 1");
    RasterGrid ae = blank_like(in.population_density);
    for (std::size_t i = 0; i < ae.size(); ++i) {
        if (any_nodata(i, {&in.electricity_access, &in.clean_fuel_access, &in.population_density})) {
            ae[i] = ae.nodata();
            continue;
        }
        const double access = w.electricity * in.electricity_access[i] + w.clean_fuel * in.clean_fuel_access[i];
        ae[i] = std::max(0.0, 1.0 - access) * in.population_density[i];
    }
    return ae;
}

RasterGrid macroeconomic_indicator(const SocioInputs& in, const RasterGrid& installable)
{
    in.validate();
    geodata::require_aligned(in.population_density.geometry(), installable.geometry(), "installable density");
    double max_density = 0.0;
    for (std::size_t i = 0; i < installable.size(); ++i)
        if (!installable.is_nodata(i)) {
            if (installable[i] < 0.0)
                throw InputError("negative installable density at cell " + std::to_string(i));
            max_density = std::max(max_density, installable[i]);
        }
    if (!(max_density > 0.0))
        throw InputError("installable density is zero across the whole extent");
    RasterGrid me = blank_like(in.population_density);
    for (std::size_t i = 0; i < me.size(); ++i) {
        if (any_nodata(i, {&in.employment_factor, &in.unemployment_rate, &in.labor_force_density})) {
            me[i] = me.nodata();
            continue;
        }
        me[i] = in.employment_factor[i] * in.unemployment_rate[i] * in.labor_force_density[i] / max_density;
    }
    return me;
}

RasterGrid other_effects_indicator(const SocioInputs& in)
{
    in.validate();
    RasterGrid oe = blank_like(in.population_density);
    for (std::size_t i = 0; i < oe.size(); ++i) {
        if (any_nodata(i, {&in.biomass_dependence, &in.poverty_headcount})) {
            oe[i] = oe.nodata();
            continue;
        }
        oe[i] = 0.5 * (in.biomass_dependence[i] + in.poverty_headcount[i]);
    }
    return oe;
}

CompositeResult composite_indicator(const RasterGrid& ae, const RasterGrid& me, const RasterGrid& oe,
                                    const CompositeWeights& w)
{
    geodata::require_aligned(ae.geometry(), me.geometry(), "macroeconomic indicator");
    geodata::require_aligned(ae.geometry(), oe.geometry(), "other effects indicator");
    if (!(w.ae >= 0.0 && w.me >= 0.0 && w.oe >= 0.0) || !(w.ae + w.me + w.oe > 0.0))
        throw ValidationError("composite weights must be >= 0 with a positive sum");

    struct Layer {
        const RasterGrid* grid;
        double weight;
        const char* name;
        double lo = INFINITY, hi = -INFINITY;
    };
    Layer layers[] = {{&ae, w.ae, "AE"}, {&me, w.me, "ME"}, {&oe, w.oe, "OE"}};
    CompositeResult r;
    for (auto& l : layers) {
        for (std::size_t i = 0; i < l.grid->size(); ++i)
            if (!l.grid->is_nodata(i)) {
                l.lo = std::min(l.lo, (*l.grid)[i]);
                l.hi = std::max(l.hi, (*l.grid)[i]);
            }
        if (l.lo == l.hi)
            r.warnings.push_back(std::string(l.name) + " is constant over the extent; scored 50");
    }
    const double wsum = w.ae + w.me + w.oe;
    r.score = blank_like(ae);
    for (std::size_t i = 0; i < ae.size(); ++i) {
        if (any_nodata(i, {&ae, &me, &oe})) {
            r.score[i] = r.score.nodata();
            continue;
        }
        double s = 0.0;
        for (const auto& l : layers) {
            const double v = l.hi > l.lo ? 100.0 * ((*l.grid)[i] - l.lo) / (l.hi - l.lo) : 50.0;
            s += l.weight * v;
        }
        r.score[i] = std::clamp(s / wsum, 0.0, 100.0);
    }
    return r;
}

double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        throw ContractViolation("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw ContractViolation("quantile level must lie in [0,1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<IndicatorStats> regional_stats(const RasterGrid& indicator, std::span<const geodata::Region> regions)
{
    std::map<std::string, std::vector<double>> by_country;
    for (const auto& r : regions) {
        geodata::require_aligned(indicator.geometry(), r.grid, "region " + r.id);
        auto& v = by_country[r.country_code];
        for (std::size_t idx : r.mask)
            if (!indicator.is_nodata(idx))
                v.push_back(indicator[idx]);
    }
    std::vector<IndicatorStats> out;
    for (auto& [iso, v] : by_country) {
        if (v.empty())
            continue;
        std::sort(v.begin(), v.end());
        IndicatorStats s;
        s.country = iso;
        s.cells = v.size();
        s.median = quantile_sorted(v, 0.5);
        s.q25 = quantile_sorted(v, 0.25);
        s.q75 = quantile_sorted(v, 0.75);
        s.iqr = s.q75 - s.q25;
        s.mean = compensated_mean(v);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace h2atlas::socio
