#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace testsupport {

double oracle_distance_m(const OracleGrid& g, std::size_t r1, std::size_t c1, std::size_t r2, std::size_t c2)
{
    auto lat = [&](std::size_t r) { return g.origin_lat + (static_cast<double>(g.n_rows - r) - 0.5) * g.cell_size; };
    const double mid = 0.5 * (lat(r1) + lat(r2));
    const double per_col = 111320.0 * std::cos(mid * std::numbers::pi / 180.0) * g.cell_size;
    const double per_row = 110540.0 * g.cell_size;
    const double dx = std::fabs(static_cast<double>(c1) - static_cast<double>(c2)) * per_col;
    const double dy = std::fabs(static_cast<double>(r1) - static_cast<double>(r2)) * per_row;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<double> brute_force_distance(const OracleGrid& g, const std::vector<std::uint8_t>& feature)
{
    std::vector<double> out(g.n_cols * g.n_rows, std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < g.n_rows; ++r)
        for (std::size_t c = 0; c < g.n_cols; ++c)
            for (std::size_t fr = 0; fr < g.n_rows; ++fr)
                for (std::size_t fc = 0; fc < g.n_cols; ++fc)
                    if (feature[fr * g.n_cols + fc])
                        out[r * g.n_cols + c] = std::min(out[r * g.n_cols + c], oracle_distance_m(g, r, c, fr, fc));
    return out;
}

std::vector<std::uint8_t> brute_force_eligibility(const OracleGrid& g, const std::vector<std::uint8_t>& region,
                                                  const std::vector<OracleCriterion>& criteria)
{
    std::vector<std::uint8_t> eligible(region);
    for (std::size_t r = 0; r < g.n_rows; ++r)
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            const std::size_t i = r * g.n_cols + c;
            if (!eligible[i])
                continue;
            for (const auto& k : criteria) {
                bool excluded = false;
                for (std::size_t fr = 0; fr < g.n_rows && !excluded; ++fr)
                    for (std::size_t fc = 0; fc < g.n_cols && !excluded; ++fc) {
                        if (!k.feature[fr * g.n_cols + fc])
                            continue;
                        excluded = (fr == r && fc == c) || oracle_distance_m(g, r, c, fr, fc) < k.buffer_m;
                    }
                if (excluded) {
                    eligible[i] = 0;
                    break;
                }
            }
        }
    return eligible;
}

namespace {

std::vector<double> hourly_generation(const std::vector<GreedyTech>& techs, const std::vector<double>& capacity_mw)
{
    std::vector<double> g(techs.front().cf.size(), 0.0);
    for (std::size_t k = 0; k < techs.size(); ++k)
        for (std::size_t t = 0; t < g.size(); ++t)
            g[t] += capacity_mw[k] * techs[k].cf[t];
    return g;
}

} // namespace

double greedy_input_mwh(const std::vector<GreedyTech>& techs, const std::vector<double>& capacity_mw,
                        double electrolyzer_mw)
{
    double sum = 0.0;
    for (double g : hourly_generation(techs, capacity_mw))
        sum += std::min(g, electrolyzer_mw);
    return sum;
}

double min_electrolyzer_mw(const std::vector<GreedyTech>& techs, const std::vector<double>& capacity_mw,
                           double target_mwh)
{
    std::vector<double> g = hourly_generation(techs, capacity_mw);
    std::sort(g.begin(), g.end(), std::greater<>());
    // input(E) = sum_{g_t < E} g_t + E * #{g_t >= E}; walk the sorted levels
    double below = 0.0;
    for (double x : g)
        below += x;
    if (below < target_mwh)
        return -1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        // E in [g[k+1], g[k]]: k+1 hours at E, the rest below
        below -= g[k];
        const double next = k + 1 < g.size() ? g[k + 1] : 0.0;
        const double e = (target_mwh - below) / static_cast<double>(k + 1);
        if (e >= next)
            return e;
    }
    return 0.0;
}

GreedyResult grid_search(const std::vector<GreedyTech>& techs, double electrolyzer_cost_per_mw, double target_mwh,
                         int steps, int zoom_levels)
{
    const std::size_t n = techs.size();
    std::vector<double> lo(n, 0.0), hi(n);
    for (std::size_t k = 0; k < n; ++k)
        hi[k] = techs[k].ceiling_mw;

    GreedyResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int level = 0; level <= zoom_levels; ++level) {
        std::vector<int> idx(n, 0);
        std::vector<double> x(n);
        for (;;) {
            for (std::size_t k = 0; k < n; ++k)
                x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / steps;
            const double e = min_electrolyzer_mw(techs, x, target_mwh);
            if (e >= 0.0) {
                double cost = e * electrolyzer_cost_per_mw;
                for (std::size_t k = 0; k < n; ++k)
                    cost += x[k] * techs[k].annual_cost_per_mw;
                if (cost < best.cost)
                    best = {x, e, cost};
            }
            std::size_t k = 0;
            while (k < n && ++idx[k] > steps)
                idx[k++] = 0;
            if (k == n)
                break;
        }
        if (!std::isfinite(best.cost))
            break;
        for (std::size_t k = 0; k < n; ++k) {
            const double h = 2.0 * (hi[k] - lo[k]) / steps;
            lo[k] = std::max(0.0, best.capacity_mw[k] - h);
            hi[k] = std::min(techs[k].ceiling_mw, best.capacity_mw[k] + h);
        }
    }
    return best;
}

double sort_quantile(std::vector<double> values, double q)
{
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

} // namespace testsupport
