#include "h2atlas/res_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::res_sim {

void WeatherSeries::validate() const
{
    const std::size_t n = ghi_w_per_m2.size();
    if (air_temp_c.size() != n || wind_speed_ms.size() != n)
        throw InputError("weather series lengths differ");
    if (n == 0 || n % kHoursPerYear != 0)
        throw InputError("weather series length must be a positive multiple of 8760");
    if (!(ref_height_m > 0.0))
        throw InputError("weather reference height must be positive");
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(ghi_w_per_m2[t]) || ghi_w_per_m2[t] < 0.0)
            throw InputError("negative or non-finite ghi at hour " + std::to_string(t));
        if (!std::isfinite(wind_speed_ms[t]) || wind_speed_ms[t] < 0.0)
            throw InputError("negative or non-finite wind speed at hour " + std::to_string(t));
        if (!std::isfinite(air_temp_c[t]))
            throw InputError("non-finite air temperature at hour " + std::to_string(t));
    }
}

WeatherSeries load_weather_csv(const std::filesystem::path& path, double ref_height_m)
{
    const CsvTable t = read_csv(path);
    const auto ci = t.column("hour_index"), cg = t.column("ghi"), ct = t.column("temp_c"),
               cw = t.column("wind_ms");
    WeatherSeries w;
    w.ref_height_m = ref_height_m;
    const std::string src = path.string();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double idx = parse_number(t.rows[r][ci], src, r + 2, "hour_index");
        if (idx != static_cast<double>(r))
            throw ParseError(src, r + 2, "hour_index must count up from 0");
        w.ghi_w_per_m2.push_back(parse_number(t.rows[r][cg], src, r + 2, "ghi"));
        w.air_temp_c.push_back(parse_number(t.rows[r][ct], src, r + 2, "temp_c"));
        w.wind_speed_ms.push_back(parse_number(t.rows[r][cw], src, r + 2, "wind_ms"));
    }
    w.validate();
    return w;
}

// ---------------------------------------------------------------------------
// Economics

void TechnoEconomics::validate() const
{
    if (!(capex_eur_per_kw > 0.0) || !std::isfinite(capex_eur_per_kw))
        throw ValidationError(component + ": capex must be positive");
    if (!(opex_share_per_year > 0.0) || !std::isfinite(opex_share_per_year))
        throw ValidationError(component + ": opex share must be positive");
    if (!(lifetime_years >= 1.0) || !std::isfinite(lifetime_years))
        throw ValidationError(component + ": lifetime must be >= 1 year");
    if (!(wacc > 0.0 && wacc < 1.0))
        throw ValidationError(component + ": wacc must lie in (0,1)");
}

double annuity_factor(double wacc, double lifetime_years)
{
    const double q = std::pow(1.0 + wacc, lifetime_years);
    return wacc * q / (q - 1.0);
}

double TechnoEconomics::annual_cost_per_kw() const
{
    validate();
    return capex_eur_per_kw * annuity_factor(wacc, lifetime_years) + capex_eur_per_kw * opex_share_per_year;
}

double lcoe(const TechnoEconomics& te, double aep_kwh_per_kw)
{
    if (!(aep_kwh_per_kw > 0.0))
        throw UndefinedCostError(te.component + ": LCOE undefined for zero annual energy");
    te.validate();
    const double a = annuity_factor(te.wacc, te.lifetime_years);
    return (te.capex_eur_per_kw * a + te.capex_eur_per_kw * te.opex_share_per_year) / aep_kwh_per_kw;
}

TechnoEconomics default_techno_economics(std::string_view component, int year)
{
    struct Row {
        double capex[4]; // 2020, 2030, 2040, 2050
        double opex;
        double lifetime;
    };
    // surrogate defaults; battery_energy is EUR/kWh
    static const std::map<std::string, Row, std::less<>> table{
        {"pv", {{520, 400, 330, 280}, 0.017, 25}},
        {"wind", {{1300, 1150, 1080, 1040}, 0.025, 25}},
        {"hydro", {{2500, 2500, 2500, 2500}, 0.02, 50}},
        {"geothermal", {{5200, 4710, 4300, 4000}, 0.025, 30}},
        {"electrolyzer", {{1000, 700, 520, 400}, 0.03, 20}},
        {"battery_energy", {{300, 230, 180, 150}, 0.01, 15}},
        {"battery_power", {{160, 120, 95, 80}, 0.01, 15}},
    };
    const auto it = table.find(component);
    if (it == table.end())
        throw ValidationError("no default techno-economics for '" + std::string(component) + "'");
    int slot = -1;
    switch (year) {
    case 2020: slot = 0; break;
    case 2030: slot = 1; break;
    case 2040: slot = 2; break;
    case 2050: slot = 3; break;
    default: throw ValidationError("techno-economic year must be 2020, 2030, 2040 or 2050");
    }
    TechnoEconomics te;
    te.component = std::string(component);
    te.year = year;
    te.capex_eur_per_kw = it->second.capex[slot];
    te.opex_share_per_year = it->second.opex;
    te.lifetime_years = it->second.lifetime;
    te.wacc = 0.08;
    return te;
}

// ---------------------------------------------------------------------------
// Profiles

GenerationProfile GenerationProfile::from_series(std::vector<double> cf)
{
    for (std::size_t t = 0; t < cf.size(); ++t)
        if (!(cf[t] >= 0.0 && cf[t] <= 1.0))
            throw InputError("capacity factor outside [0,1] at hour " + std::to_string(t));
    GenerationProfile p;
    p.mean_cf = compensated_mean(cf);
    p.full_load_hours = p.mean_cf * static_cast<double>(kHoursPerYear);
    p.capacity_factor = std::move(cf);
    return p;
}

GenerationProfile year_slice(const GenerationProfile& p, std::size_t year)
{
    if ((year + 1) * kHoursPerYear > p.hours())
        throw ContractViolation("year_slice: profile has only " + std::to_string(p.years()) + " years");
    const auto first = p.capacity_factor.begin() + static_cast<std::ptrdiff_t>(year * kHoursPerYear);
    return GenerationProfile::from_series(std::vector<double>(first, first + kHoursPerYear));
}

std::vector<double> yearly_means(const GenerationProfile& p)
{
    std::vector<double> out;
    for (std::size_t y = 0; y < p.years(); ++y)
        out.push_back(compensated_mean(std::span(p.capacity_factor).subspan(y * kHoursPerYear, kHoursPerYear)));
    return out;
}

std::size_t representative_year(std::span<const double> yearly_scores)
{
    if (yearly_scores.empty())
        throw ContractViolation("representative_year: no years");
    std::vector<std::size_t> order(yearly_scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return yearly_scores[a] < yearly_scores[b]; });
    return order[(order.size() - 1) / 2];
}

double pv_capacity_factor(double ghi, double air_temp_c, const PvParams& p)
{
    if (ghi < 0.0)
        throw InputError("negative ghi");
    const double cell_temp = air_temp_c + p.k_noct * ghi / 800.0;
    const double cf = (ghi / 1000.0) * p.performance_ratio * (1.0 + p.temp_coefficient_per_k * (cell_temp - 25.0));
    return std::clamp(cf, 0.0, 1.0);
}

GenerationProfile simulate_pv(const WeatherSeries& weather, const PvParams& params)
{
    weather.validate();
    std::vector<double> cf(weather.hours());
    for (std::size_t t = 0; t < cf.size(); ++t)
        cf[t] = pv_capacity_factor(weather.ghi_w_per_m2[t], weather.air_temp_c[t], params);
    return GenerationProfile::from_series(std::move(cf));
}

// ---------------------------------------------------------------------------
// Wind

WindTurbine::WindTurbine(std::vector<PowerCurvePoint> curve, double hub_height_m, double cut_in_ms,
                         double rated_speed_ms, double cut_out_ms)
    : curve_(std::move(curve)), hub_height_m_(hub_height_m), cut_in_(cut_in_ms),
      rated_speed_(rated_speed_ms), cut_out_(cut_out_ms)
{
    validate();
    const std::size_t n = curve_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = curve_[k + 1].speed_ms - curve_[k].speed_ms;
        delta[k] = (curve_[k + 1].power_kw - curve_[k].power_kw) / h[k];
    }
    slopes_.assign(n, 0.0);
    slopes_[0] = delta[0];
    slopes_[n - 1] = delta[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0)
            continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        slopes_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
}

void WindTurbine::validate()
{
    if (curve_.size() < 2)
        throw ValidationError("power curve needs at least two points");
    if (!(hub_height_m_ > 0.0))
        throw ValidationError("hub height must be positive");
    if (!(0.0 <= cut_in_ && cut_in_ < rated_speed_ && rated_speed_ <= cut_out_))
        throw ValidationError("power curve needs 0 <= cut-in < rated <= cut-out");
    double max_kw = 0.0;
    for (std::size_t k = 0; k < curve_.size(); ++k) {
        const auto& pt = curve_[k];
        if (!std::isfinite(pt.speed_ms) || !std::isfinite(pt.power_kw) || pt.power_kw < 0.0)
            throw ValidationError("power curve point " + std::to_string(k) + " is invalid");
        if (k && !(pt.speed_ms > curve_[k - 1].speed_ms))
            throw ValidationError("power curve speeds must increase strictly");
        if ((pt.speed_ms < cut_in_ || pt.speed_ms > cut_out_) && pt.power_kw != 0.0)
            throw ValidationError("power curve must be zero below cut-in and above cut-out");
        if (k && pt.speed_ms <= rated_speed_ && pt.power_kw < curve_[k - 1].power_kw)
            throw ValidationError("power curve decreases below rated speed at "
                                  + format_number(pt.speed_ms) + " m/s");
        max_kw = std::max(max_kw, pt.power_kw);
    }
    if (!(max_kw > 0.0))
        throw ValidationError("power curve never produces power");
    rated_kw_ = max_kw;
}

WindTurbine WindTurbine::synthetic_default()
{
    constexpr double cut_in = 3.0, rated = 12.0, cut_out = 25.0, rated_kw = 4200.0;
    std::vector<PowerCurvePoint> curve;
    for (int i = 0; i <= 50; ++i) {
        const double v = 0.5 * i;
        double p = 0.0;
        if (v >= rated)
            p = rated_kw;
        else if (v >= cut_in)
            p = rated_kw * (v * v * v - cut_in * cut_in * cut_in) / (rated * rated * rated - cut_in * cut_in * cut_in);
        curve.push_back({v, p});
    }
    return WindTurbine(std::move(curve), 120.0, cut_in, rated, cut_out);
}

WindTurbine WindTurbine::from_csv(const std::filesystem::path& path, double hub_height_m)
{
    const CsvTable t = read_csv(path);
    std::vector<PowerCurvePoint> curve;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        curve.push_back({t.number(r, "speed_ms"), t.number(r, "power_kw")});
    if (curve.size() < 2)
        throw ValidationError(path.string() + ": power curve needs at least two points");
    double max_kw = 0.0;
    for (const auto& p : curve)
        max_kw = std::max(max_kw, p.power_kw);
    double cut_in = curve.front().speed_ms, rated = curve.back().speed_ms, cut_out = curve.back().speed_ms;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        if (curve[k].power_kw > 0.0) {
            cut_in = k ? curve[k - 1].speed_ms : curve[k].speed_ms;
            break;
        }
    }
    for (const auto& p : curve)
        if (p.power_kw == max_kw) {
            rated = p.speed_ms;
            break;
        }
    for (const auto& p : curve)
        if (p.power_kw > 0.0)
            cut_out = p.speed_ms;
    return WindTurbine(std::move(curve), hub_height_m, cut_in, rated, cut_out);
}

double WindTurbine::power_kw(double v) const
{
    if (v < cut_in_ || v > cut_out_)
        return 0.0;
    if (v >= rated_speed_)
        return rated_kw_;
    if (v <= curve_.front().speed_ms || v >= curve_.back().speed_ms)
        return 0.0;
    const auto it = std::upper_bound(curve_.begin(), curve_.end(), v,
                                     [](double s, const PowerCurvePoint& p) { return s < p.speed_ms; });
    const std::size_t k = static_cast<std::size_t>(it - curve_.begin()) - 1;
    const double h = curve_[k + 1].speed_ms - curve_[k].speed_ms;
    const double s = (v - curve_[k].speed_ms) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    const double p = h00 * curve_[k].power_kw + h10 * h * slopes_[k] + h01 * curve_[k + 1].power_kw
        + h11 * h * slopes_[k + 1];
    return std::clamp(p, 0.0, rated_kw_);
}

GenerationProfile simulate_wind(const WeatherSeries& weather, const WindTurbine& turbine, double shear_exponent)
{
    weather.validate();
    const double scale = std::pow(turbine.hub_height_m() / weather.ref_height_m, shear_exponent);
    std::vector<double> cf(weather.hours());
    for (std::size_t t = 0; t < cf.size(); ++t)
        cf[t] = turbine.power_kw(weather.wind_speed_ms[t] * scale) / turbine.rated_power_kw();
    return GenerationProfile::from_series(std::move(cf));
}

// ---------------------------------------------------------------------------
// Hydropower and geothermal

namespace {

void check_hydro_source(std::span<const HydroSample> source)
{
    if (source.empty())
        throw DataQualityError("hydropower series is empty");
    for (std::size_t k = 0; k < source.size(); ++k) {
        if (!std::isfinite(source[k].hour) || !(source[k].value >= 0.0 && source[k].value <= 1.0))
            throw DataQualityError("hydropower sample " + std::to_string(k) + " is not a capacity factor");
        if (k && !(source[k].hour > source[k - 1].hour))
            throw DataQualityError("hydropower timestamps must increase strictly");
        if (k && source[k].hour - source[k - 1].hour > kMaxHydroGapHours)
            throw DataQualityError("hydropower series has a gap longer than 30 days before sample "
                                   + std::to_string(k));
    }
}

double interpolate(std::span<const HydroSample> s, double t)
{
    if (t <= s.front().hour)
        return s.front().value;
    if (t >= s.back().hour)
        return s.back().value;
    const auto it = std::upper_bound(s.begin(), s.end(), t,
                                     [](double x, const HydroSample& p) { return x < p.hour; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.hour) / (b.hour - a.hour);
    return a.value + w * (b.value - a.value);
}

} // namespace

GenerationProfile resample_hydro(std::span<const HydroSample> source, std::size_t hours)
{
    check_hydro_source(source);
    std::vector<double> cf(hours);
    for (std::size_t t = 0; t < hours; ++t)
        cf[t] = std::clamp(interpolate(source, static_cast<double>(t) + 0.5), 0.0, 1.0);
    return GenerationProfile::from_series(std::move(cf));
}

double hydro_trapezoid_energy(std::span<const HydroSample> source, double hours)
{
    check_hydro_source(source);
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, interpolate(source, 0.0));
    for (const auto& s : source)
        if (s.hour > 0.0 && s.hour < hours)
            pts.emplace_back(s.hour, s.value);
    pts.emplace_back(hours, interpolate(source, hours));
    CompensatedSum e;
    for (std::size_t k = 1; k < pts.size(); ++k)
        e.add(0.5 * (pts[k].second + pts[k - 1].second) * (pts[k].first - pts[k - 1].first));
    return e.value();
}

GenerationProfile geothermal_profile(double availability, std::size_t hours)
{
    if (!(availability > 0.0 && availability <= 1.0))
        throw ValidationError("geothermal availability must lie in (0,1]");
    return GenerationProfile::from_series(std::vector<double>(hours, availability));
}

GenerationProfile dispatch_below_ceiling(const GenerationProfile& ceiling, std::span<const double> requested_cf)
{
    if (requested_cf.size() != ceiling.hours())
        throw ContractViolation("dispatch request length differs from the ceiling profile");
    std::vector<double> cf(ceiling.hours());
    for (std::size_t t = 0; t < cf.size(); ++t)
        cf[t] = std::clamp(requested_cf[t], 0.0, ceiling.capacity_factor[t]);
    return GenerationProfile::from_series(std::move(cf));
}

} // namespace h2atlas::res_sim
