#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace h2atlas {

enum class Technology { pv, wind, hydro, geothermal };

inline constexpr std::array<Technology, 4> kAllTechnologies{
    Technology::pv, Technology::wind, Technology::hydro, Technology::geothermal};

constexpr std::string_view to_string(Technology t) noexcept
{
    switch (t) {
    case Technology::pv: return "pv";
    case Technology::wind: return "wind";
    case Technology::hydro: return "hydro";
    case Technology::geothermal: return "geothermal";
    }
    return "unknown";
}

inline std::optional<Technology> technology_from_string(std::string_view s) noexcept
{
    for (Technology t : kAllTechnologies)
        if (to_string(t) == s)
            return t;
    return std::nullopt;
}

} // namespace h2atlas
