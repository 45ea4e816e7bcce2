#include <cstdint>
#include <vector>

#include "h2atlas/geodata.hpp"

namespace h2atlas::geodata {

// Exact transform for the anisotropic lon/lat metric. Within one source row
// the east-west scale is constant, so the nearest feature cell of that row
// is the one with the nearest column index. For each target cell we scan
// source rows outward from its own row and stop once the north-south offset
// alone exceeds the best distance found. Every candidate is evaluated with
// the same expression as cell_center_distance_m, so the result is bitwise
// equal to an all-pairs minimum.
RasterGrid distance_to_feature(const MaskGrid& feature)
{
    const GridGeometry& g = feature.geometry();
    RasterGrid out(g, kUnreachable, kUnreachable);
    const std::size_t rows = g.n_rows, cols = g.n_cols;

    constexpr std::int64_t kNone = -1;
    // nearest feature column at or left of c / at or right of c, per row
    std::vector<std::int64_t> left(g.size(), kNone), right(g.size(), kNone);
    std::vector<bool> row_has(rows, false);
    for (std::size_t r = 0; r < rows; ++r) {
        std::int64_t last = kNone;
        for (std::size_t c = 0; c < cols; ++c) {
            if (feature[g.index(r, c)])
                last = static_cast<std::int64_t>(c);
            left[g.index(r, c)] = last;
        }
        last = kNone;
        for (std::size_t c = cols; c-- > 0;) {
            if (feature[g.index(r, c)])
                last = static_cast<std::int64_t>(c);
            right[g.index(r, c)] = last;
        }
        row_has[r] = last != kNone;
    }

    const double dy_unit = row_step_m(g);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double best2 = kUnreachable;
            const auto ci = static_cast<std::int64_t>(c);
            auto visit = [&](std::size_t src) {
                if (!row_has[src])
                    return;
                std::int64_t dc = INT64_MAX;
                if (const auto l = left[g.index(src, c)]; l != kNone)
                    dc = ci - l;
                if (const auto rt = right[g.index(src, c)]; rt != kNone && rt - ci < dc)
                    dc = rt - ci;
                const double dr = static_cast<double>(r > src ? r - src : src - r);
                const double dx = static_cast<double>(dc) * column_step_m(g, r, src);
                const double dy = dr * dy_unit;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best2)
                    best2 = d2;
            };
            for (std::size_t k = 0;; ++k) {
                const double dy = static_cast<double>(k) * dy_unit;
                if (dy * dy > best2)
                    break;
                const bool up = k <= r, down = r + k < rows;
                if (!up && !down)
                    break;
                if (up)
                    visit(r - k);
                if (down && k != 0)
                    visit(r + k);
            }
            out[g.index(r, c)] = std::sqrt(best2);
        }
    }
    return out;
}

} // namespace h2atlas::geodata
