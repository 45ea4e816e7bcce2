#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <span>
#include <sstream>

#include "Highs.h"
#include "h2atlas/errors.hpp"
#include "h2atlas/format.hpp"
#include "h2atlas/h2opt.hpp"
#include "h2atlas/numeric.hpp"

namespace h2atlas::h2opt {

double default_electrolyzer_efficiency(int year)
{
    switch (year) {
    case 2020: return 50.0;
    case 2030: return 48.0;
    case 2040: return 46.0;
    case 2050: return 44.0;
    default: throw ValidationError("electrolyzer year must be 2020, 2030, 2040 or 2050");
    }
}

std::size_t RegionSystemInputs::hours() const
{
    return technologies.empty() ? res_sim::kHoursPerYear : technologies.front().profile.hours();
}

void RegionSystemInputs::validate() const
{
    if (!(efficiency_kwh_per_kg >= kLhvKwhPerKg))
        throw ValidationError(region_id + ": electrolyzer efficiency below the LHV floor of 33.33 kWh/kg");
    electrolyzer.validate();
    if (battery_offered) {
        battery_energy.validate();
        battery_power.validate();
        if (!(battery_round_trip > 0.0 && battery_round_trip <= 1.0))
            throw ValidationError(region_id + ": battery round-trip efficiency must lie in (0,1]");
    }
    if (!(water_use_l_per_kg >= 0.0))
        throw ValidationError(region_id + ": water use must be >= 0");
    const std::size_t n = hours();
    if (n == 0)
        throw ValidationError(region_id + ": empty generation profiles");
    for (const auto& t : technologies) {
        if (!(t.ceiling_mw >= 0.0) || !std::isfinite(t.ceiling_mw))
            throw ValidationError(region_id + ": " + std::string(to_string(t.technology))
                                  + " ceiling must be finite and >= 0");
        if (t.profile.hours() != n)
            throw ValidationError(region_id + ": generation profiles differ in length");
        t.economics.validate();
    }
}

double RegionSystemInputs::max_generation_mwh() const
{
    CompensatedSum s;
    for (const auto& t : technologies)
        s.add(t.ceiling_mw * t.profile.mean_cf * static_cast<double>(res_sim::kHoursPerYear));
    return s.value();
}

RegionSystemInputs default_system(std::string region_id, int year)
{
    RegionSystemInputs in;
    in.region_id = std::move(region_id);
    in.electrolyzer = res_sim::default_techno_economics("electrolyzer", year);
    in.efficiency_kwh_per_kg = default_electrolyzer_efficiency(year);
    in.battery_energy = res_sim::default_techno_economics("battery_energy", year);
    in.battery_power = res_sim::default_techno_economics("battery_power", year);
    return in;
}

double max_h2_potential_kg(const RegionSystemInputs& inputs)
{
    inputs.validate();
    return inputs.max_generation_mwh() * 1000.0 / inputs.efficiency_kwh_per_kg;
}

double max_h2_potential_twh(const RegionSystemInputs& inputs)
{
    return max_h2_potential_kg(inputs) * kLhvKwhPerKg * 1e-9;
}

double annual_capacity_cost(const RegionSystemInputs& inputs, const std::map<Technology, double>& capacity_mw,
                            double electrolyzer_mw, double battery_mwh, double battery_mw)
{
    CompensatedSum cost;
    for (const auto& [tech, mw] : capacity_mw) {
        const auto it = std::find_if(inputs.technologies.begin(), inputs.technologies.end(),
                                     [&](const TechnologyInput& t) { return t.technology == tech; });
        if (it == inputs.technologies.end()) {
            if (mw > 0.0)
                throw ContractViolation(inputs.region_id + ": capacity given for a technology not offered");
            continue;
        }
        cost.add(mw * 1000.0 * it->economics.annual_cost_per_kw());
    }
    cost.add(electrolyzer_mw * 1000.0 * inputs.electrolyzer.annual_cost_per_kw());
    if (battery_mwh > 0.0)
        cost.add(battery_mwh * 1000.0 * inputs.battery_energy.annual_cost_per_kw());
    if (battery_mw > 0.0)
        cost.add(battery_mw * 1000.0 * inputs.battery_power.annual_cost_per_kw());
    return cost.value();
}

double water_cost(const RegionSystemInputs& inputs, double h2_kg)
{
    if (inputs.water.empty())
        return 0.0;
    return water::draw_water(inputs.water, water::water_demand_m3(h2_kg, inputs.water_use_l_per_kg)).cost_eur;
}

namespace {

// Row-wise LP assembly. Power variables are expressed in units of the mean
// electrolyzer load (target MWh / hours) and costs in EUR per kW, which keeps
// coefficients near unity whatever the region size.
class LpBuilder {
public:
    int add_col(double cost, double lower, double upper)
    {
        lp_.col_cost_.push_back(cost);
        lp_.col_lower_.push_back(lower);
        lp_.col_upper_.push_back(upper);
        return lp_.num_col_++;
    }

    void add_row(double lower, double upper, std::initializer_list<std::pair<int, double>> terms)
    {
        for (const auto& [c, v] : terms)
            push(c, v);
        close_row(lower, upper);
    }

    void push(int col, double value)
    {
        if (value != 0.0) {
            lp_.a_matrix_.index_.push_back(col);
            lp_.a_matrix_.value_.push_back(value);
        }
    }

    void close_row(double lower, double upper)
    {
        lp_.row_lower_.push_back(lower);
        lp_.row_upper_.push_back(upper);
        ++lp_.num_row_;
        lp_.a_matrix_.start_.push_back(static_cast<HighsInt>(lp_.a_matrix_.index_.size()));
    }

    HighsLp finish()
    {
        lp_.a_matrix_.format_ = MatrixFormat::kRowwise;
        lp_.a_matrix_.num_col_ = lp_.num_col_;
        lp_.a_matrix_.num_row_ = lp_.num_row_;
        lp_.sense_ = ObjSense::kMinimize;
        return std::move(lp_);
    }

    LpBuilder()
    {
        lp_.num_col_ = 0;
        lp_.num_row_ = 0;
        lp_.a_matrix_.start_.assign(1, 0);
    }

private:
    HighsLp lp_;
};

std::string ceiling_summary(const RegionSystemInputs& in)
{
    std::ostringstream s;
    s << "generation ceilings";
    for (const auto& t : in.technologies)
        s << ' ' << to_string(t.technology) << '=' << format_number(t.ceiling_mw) << "MW";
    return s.str();
}

} // namespace



namespace {

// Problem data in solver units: power in multiples of the mean electrolyzer
// load, energy in those units times hours, costs in EUR per kW (or kWh) and
// year. The first-stage vector y holds the technology capacities followed by
// the electrolyzer rating, battery energy and battery power.
struct Scaled {
    std::size_t hours = 0;
    std::size_t n = 0;
    double unit_mw = 0.0;
    bool battery = false;
    double eta = 1.0; ///< one-way battery efficiency
    std::vector<const std::vector<double>*> cf;
    std::vector<double> cost; ///< per entry of y
    std::vector<double> upper; ///< per entry of y
    std::vector<double> energy; ///< sum of cf per technology

    std::size_t E() const noexcept { return n; }
    std::size_t B() const noexcept { return n + 1; }
    std::size_t P() const noexcept { return n + 2; }
    std::size_t size() const noexcept { return n + 3; }
    double target() const noexcept { return static_cast<double>(hours); }
};

Scaled scale_inputs(const RegionSystemInputs& in, double unit_mw)
{
    Scaled p;
    p.hours = in.hours();
    p.n = in.technologies.size();
    p.unit_mw = unit_mw;
    p.battery = in.battery_offered;
    p.eta = std::sqrt(in.battery_round_trip);
    for (const auto& t : in.technologies) {
        p.cf.push_back(&t.profile.capacity_factor);
        p.cost.push_back(t.economics.annual_cost_per_kw());
        p.upper.push_back(t.ceiling_mw / unit_mw);
        p.energy.push_back(compensated_sum(t.profile.capacity_factor));
    }
    p.cost.push_back(in.electrolyzer.annual_cost_per_kw());
    p.upper.push_back(kHighsInf);
    p.cost.push_back(in.battery_offered ? in.battery_energy.annual_cost_per_kw() : 0.0);
    p.cost.push_back(in.battery_offered ? in.battery_power.annual_cost_per_kw() : 0.0);
    p.upper.push_back(in.battery_offered ? kHighsInf : 0.0);
    p.upper.push_back(in.battery_offered ? kHighsInf : 0.0);
    return p;
}

struct Trajectory {
    std::vector<double> gen, e, charge, discharge;
};

struct Throughput {
    double value = 0.0;
    std::vector<double> grad;
};

// Maximum annual electrolyzer input F(y) for fixed capacities: the
// electrolyzer takes what is generated up to its rating, surplus charges the
// battery, deficits discharge it, and the rest is curtailed. With a single
// lossless-in-time store and no prices this greedy rule is throughput-optimal;
// the cyclic boundary is met by iterating the start charge down from full to
// the largest fixed point. F is concave, piecewise linear and positively
// homogeneous. Its gradient is propagated alongside (forward mode). Ties
// between candidate branches are resolved toward a fixed generic direction,
// so the result is the gradient of a linear piece adjacent to y and hence a
// valid supergradient.
class ThroughputModel {
public:
    explicit ThroughputModel(const Scaled& p) : p_(p), dir_(p.size())
    {
        for (std::size_t j = 0; j < dir_.size(); ++j)
            dir_[j] = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(j + 1), 1.0);
    }

    Throughput evaluate(std::span<const double> y, Trajectory* traj = nullptr) const
    {
        const std::size_t m = p_.size();
        std::vector<double> ds0(m, 0.0);
        if (!p_.battery || y[p_.B()] <= 0.0 || y[p_.P()] <= 0.0) {
            const Pass pass = run(y, 0.0, ds0, traj);
            return {pass.value, pass.dvalue};
        }
        double s0 = y[p_.B()];
        ds0[p_.B()] = 1.0;
        const double tol = 1e-12 * (1.0 + y[p_.B()]);
        for (int k = 0; k < 200; ++k) {
            Pass pass = run(y, s0, ds0, nullptr);
            if (pass.s_end >= s0 - tol) {
                if (traj)
                    run(y, s0, ds0, traj);
                return {pass.value, pass.dvalue};
            }
            if (!pass.clamped && pass.min_soc > 0.0) {
                s0 -= pass.min_soc;
                for (std::size_t j = 0; j < m; ++j)
                    ds0[j] -= pass.dmin_soc[j];
            } else {
                s0 = pass.s_end;
                ds0 = pass.ds_end;
            }
        }
        std::fill(ds0.begin(), ds0.end(), 0.0);
        const Pass pass = run(y, 0.0, ds0, traj);
        return {pass.value, pass.dvalue};
    }

private:
    struct Pass {
        double value = 0.0;
        std::vector<double> dvalue;
        double s_end = 0.0;
        std::vector<double> ds_end;
        bool clamped = false;
        double min_soc = 0.0;
        std::vector<double> dmin_soc;
    };

    double along(const std::vector<double>& d) const noexcept
    {
        double s = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j)
            s += d[j] * dir_[j];
        return s;
    }

    // a < b at y + eps * dir for vanishing eps
    bool less(double a, const std::vector<double>& da, double b, const std::vector<double>& db) const noexcept
    {
        return a < b || (a == b && along(da) < along(db));
    }

    Pass run(std::span<const double> y, double s0, const std::vector<double>& ds0, Trajectory* traj) const
    {
        const std::size_t T = p_.hours, n = p_.n, m = p_.size();
        const double E = y[p_.E()], B = y[p_.B()], P = y[p_.P()], eta = p_.eta;
        const bool battery = p_.battery;
        Pass r;
        r.dvalue.assign(m, 0.0);
        double s = s0;
        std::vector<double> ds = ds0, dG(m), cand_a(m), cand_b(m), cand_c(m);
        r.min_soc = s0;
        r.dmin_soc = ds0;
        CompensatedSum value;
        if (traj) {
            traj->gen.assign(T, 0.0);
            traj->e.assign(T, 0.0);
            traj->charge.assign(T, 0.0);
            traj->discharge.assign(T, 0.0);
        }
        auto unit = [&](std::vector<double>& v, std::size_t j) {
            std::fill(v.begin(), v.end(), 0.0);
            v[j] = 1.0;
        };

        for (std::size_t t = 0; t < T; ++t) {
            double G = 0.0;
            std::fill(dG.begin(), dG.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double c = (*p_.cf[i])[t];
                G += c * y[i];
                dG[i] = c;
            }
            unit(cand_a, p_.E());
            double e = 0.0, ch = 0.0, dis = 0.0;
            if (!less(G, dG, E, cand_a)) {
                // surplus hour: electrolyzer at rating, charge from the surplus
                e = E;
                r.dvalue[p_.E()] += 1.0;
                value.add(E);
                if (battery) {
                    const double surplus = G - E;
                    for (std::size_t j = 0; j < m; ++j)
                        cand_b[j] = dG[j] - (j == p_.E() ? 1.0 : 0.0);
                    const double room = (B - s) / eta;
                    for (std::size_t j = 0; j < m; ++j)
                        cand_c[j] = ((j == p_.B() ? 1.0 : 0.0) - ds[j]) / eta;
                    unit(cand_a, p_.P());
                    double best = P;
                    const std::vector<double>* dbest = &cand_a;
                    bool limited_by_room = false;
                    if (less(surplus, cand_b, best, *dbest)) {
                        best = surplus;
                        dbest = &cand_b;
                    }
                    if (less(room, cand_c, best, *dbest)) {
                        best = room;
                        dbest = &cand_c;
                        limited_by_room = true;
                    }
                    ch = std::max(0.0, best);
                    r.clamped = r.clamped || limited_by_room;
                    s += eta * ch;
                    for (std::size_t j = 0; j < m; ++j)
                        ds[j] += eta * (*dbest)[j];
                    if (limited_by_room)
                        s = B;
                }
            } else {
                // deficit hour: electrolyzer takes all generation plus discharge
                e = G;
                value.add(G);
                for (std::size_t j = 0; j < m; ++j)
                    r.dvalue[j] += dG[j];
                if (battery) {
                    const double deficit = E - G;
                    for (std::size_t j = 0; j < m; ++j)
                        cand_b[j] = (j == p_.E() ? 1.0 : 0.0) - dG[j];
                    const double avail = eta * s;
                    for (std::size_t j = 0; j < m; ++j)
                        cand_c[j] = eta * ds[j];
                    unit(cand_a, p_.P());
                    double best = P;
                    const std::vector<double>* dbest = &cand_a;
                    bool limited_by_charge = false;
                    if (less(deficit, cand_b, best, *dbest)) {
                        best = deficit;
                        dbest = &cand_b;
                    }
                    if (less(avail, cand_c, best, *dbest)) {
                        best = avail;
                        dbest = &cand_c;
                        limited_by_charge = true;
                    }
                    dis = std::max(0.0, best);
                    r.clamped = r.clamped || limited_by_charge;
                    e += dis;
                    value.add(dis);
                    for (std::size_t j = 0; j < m; ++j) {
                        r.dvalue[j] += (*dbest)[j];
                        ds[j] -= (*dbest)[j] / eta;
                    }
                    s = limited_by_charge ? 0.0 : std::max(0.0, s - dis / eta);
                }
            }
            if (battery && less(s, ds, r.min_soc, r.dmin_soc)) {
                r.min_soc = s;
                r.dmin_soc = ds;
            }
            if (traj) {
                traj->gen[t] = G;
                traj->e[t] = e;
                traj->charge[t] = ch;
                traj->discharge[t] = dis;
            }
        }
        r.value = value.value();
        r.s_end = s;
        r.ds_end = ds;
        return r;
    }

    const Scaled& p_;
    std::vector<double> dir_;
};

void configure(Highs& h)
{
    h.setOptionValue("output_flag", false);
    h.setOptionValue("threads", 1);
    h.setOptionValue("random_seed", 0);
    h.setOptionValue("solver", "simplex");
}

double first_stage_cost(const Scaled& p, std::span<const double> y)
{
    double c = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j)
        c += p.cost[j] * y[j];
    return c;
}

// Smallest feasible completion of a master point: raise the electrolyzer
// rating, then scale capacities toward their ceilings, each by Newton steps on
// the concave throughput (exact from below on a piecewise-linear function).
std::vector<double> make_feasible(const Scaled& p, const ThroughputModel& model, std::vector<double> y)
{
    const double H = p.target(), tol = 1e-12 * H;
    auto f = model.evaluate(y);
    for (int k = 0; k < 100 && f.value < H - tol && f.grad[p.E()] > 0.0; ++k) {
        y[p.E()] += (H - f.value) / f.grad[p.E()];
        f = model.evaluate(y);
    }
    if (f.value >= H - tol)
        return y;
    const std::vector<double> base = y;
    double alpha = 1.0;
    for (int k = 0; k < 200 && f.value < H - tol; ++k) {
        // d/d alpha of F(min(alpha * base, upper))
        double slope = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (alpha * base[j] < p.upper[j])
                slope += f.grad[j] * base[j];
        if (!(slope > 0.0))
            break;
        alpha += (H - f.value) / slope;
        for (std::size_t j = 0; j < y.size(); ++j)
            y[j] = std::min(alpha * base[j], p.upper[j]);
        f = model.evaluate(y);
    }
    if (f.value < H - tol)
        return {};
    return y;
}

// Outer approximation of {y : F(y) >= H} by supergradient cuts, with the
// cheapest feasible completion of every master point as the incumbent.
std::vector<double> solve_first_stage(const Scaled& p, const ThroughputModel& model, const std::string& region_id)
{
    const std::size_t m = p.size();
    const double inf = kHighsInf, H = p.target();
    Highs master;
    configure(master);
    master.setOptionValue("primal_feasibility_tolerance", 1e-10);
    master.setOptionValue("dual_feasibility_tolerance", 1e-10);
    for (std::size_t j = 0; j < m; ++j) {
        const double lower = j == p.E() ? 1.0 : 0.0;
        master.addCol(p.cost[j], lower, p.upper[j], 0, nullptr, nullptr);
    }
    std::vector<HighsInt> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    master.addRow(H, inf, static_cast<HighsInt>(p.n), idx.data(), p.energy.data());

    std::vector<double> best, y(m), cut(m);
    double upper_bound = inf, last_lower = -inf;
    int stalled = 0;
    for (int iter = 0; iter < 5000; ++iter) {
        master.run();
        if (master.getModelStatus() != HighsModelStatus::kOptimal)
            throw InfeasibleError(region_id + ": no capacity mix reaches the hydrogen target", "generation ceilings");
        const auto& sol = master.getSolution().col_value;
        for (std::size_t j = 0; j < m; ++j)
            y[j] = std::clamp(sol[j], j == p.E() ? 1.0 : 0.0, p.upper[j]);
        const double lower_bound = master.getInfo().objective_function_value;

        const auto f = model.evaluate(y);
        if (f.value >= H * (1.0 - 1e-12) && first_stage_cost(p, y) < upper_bound) {
            upper_bound = first_stage_cost(p, y);
            best = y;
        } else if (f.value < H) {
            auto repaired = make_feasible(p, model, y);
            if (!repaired.empty() && first_stage_cost(p, repaired) < upper_bound) {
                upper_bound = first_stage_cost(p, repaired);
                best = std::move(repaired);
            }
        }
        if (upper_bound - lower_bound <= 1e-9 * std::fabs(upper_bound))
            break;
        stalled = lower_bound > last_lower + 1e-12 * std::fabs(lower_bound) ? 0 : stalled + 1;
        last_lower = std::max(last_lower, lower_bound);
        if (stalled > 50)
            break;

        // F(y_k) + g.(y - y_k) >= H
        double rhs = H - f.value;
        for (std::size_t j = 0; j < m; ++j) {
            cut[j] = f.grad[j];
            rhs += f.grad[j] * y[j];
        }
        master.addRow(rhs, inf, static_cast<HighsInt>(m), idx.data(), cut.data());
    }
    if (best.empty())
        throw InfeasibleError(region_id + ": no capacity mix reaches the hydrogen target", "generation ceilings");
    return best;
}

struct Dispatch {
    std::vector<double> y;
    std::vector<double> e, charge, discharge;
    std::vector<std::vector<double>> dispatched; ///< per technology, dispatchable only
};

// Hourly schedule for a first-stage point; output beyond the target is
// curtailed, and dispatchable technologies absorb curtailment first.
Dispatch schedule(const RegionSystemInputs& in, const Scaled& p, const ThroughputModel& model,
                  std::vector<double> y)
{
    Trajectory tr;
    const auto f = model.evaluate(y, &tr);
    const double shrink = f.value > p.target() ? p.target() / f.value : 1.0;
    Dispatch d;
    d.y = std::move(y);
    d.e = std::move(tr.e);
    for (double& e : d.e)
        e *= shrink;
    d.charge = std::move(tr.charge);
    d.discharge = std::move(tr.discharge);
    d.dispatched.resize(p.n);
    for (std::size_t k = 0; k < p.n; ++k) {
        if (!in.technologies[k].dispatchable)
            continue;
        d.dispatched[k].assign(p.hours, 0.0);
    }
    for (std::size_t t = 0; t < p.hours; ++t) {
        double spare = tr.gen[t] + d.discharge[t] - d.charge[t] - d.e[t];
        for (std::size_t k = 0; k < p.n; ++k) {
            if (!in.technologies[k].dispatchable)
                continue;
            const double ceiling = (*p.cf[k])[t] * d.y[k];
            const double cut = std::clamp(spare, 0.0, ceiling);
            d.dispatched[k][t] = ceiling - cut;
            spare -= cut;
        }
    }
    return d;
}

// Full hourly LP over capacities and dispatch with a cyclic battery.
Dispatch solve_lp(const RegionSystemInputs& in, const Scaled& p)
{
    const std::size_t T = p.hours, n = p.n;
    const double inf = kHighsInf;
    LpBuilder b;
    std::vector<int> y_col;
    for (std::size_t j = 0; j < p.size(); ++j)
        y_col.push_back(b.add_col(p.cost[j], 0.0, p.upper[j]));
    const int elz = y_col[p.E()], bat_e = y_col[p.B()], bat_p = y_col[p.P()];

    std::vector<int> e_col(T), ch_col(T), dis_col(T), soc_col(T);
    std::vector<std::vector<int>> g_col(n);
    for (std::size_t t = 0; t < T; ++t) {
        e_col[t] = b.add_col(0.0, 0.0, inf);
        ch_col[t] = b.add_col(0.0, 0.0, p.battery ? inf : 0.0);
        dis_col[t] = b.add_col(0.0, 0.0, p.battery ? inf : 0.0);
        soc_col[t] = b.add_col(0.0, 0.0, p.battery ? inf : 0.0);
    }
    for (std::size_t k = 0; k < n; ++k)
        if (in.technologies[k].dispatchable)
            for (std::size_t t = 0; t < T; ++t)
                g_col[k].push_back(b.add_col(0.0, 0.0, inf));

    for (std::size_t t = 0; t < T; ++t) {
        // electrolyzer + charge - discharge <= generation; the slack is curtailed
        b.push(e_col[t], 1.0);
        b.push(ch_col[t], 1.0);
        b.push(dis_col[t], -1.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (in.technologies[k].dispatchable)
                b.push(g_col[k][t], -1.0);
            else
                b.push(y_col[k], -(*p.cf[k])[t]);
        }
        b.close_row(-inf, 0.0);
        b.add_row(-inf, 0.0, {{e_col[t], 1.0}, {elz, -1.0}});
        for (std::size_t k = 0; k < n; ++k)
            if (in.technologies[k].dispatchable)
                b.add_row(-inf, 0.0, {{g_col[k][t], 1.0}, {y_col[k], -(*p.cf[k])[t]}});
        if (!p.battery)
            continue;
        const std::size_t prev = t == 0 ? T - 1 : t - 1;
        b.add_row(-inf, 0.0, {{ch_col[t], 1.0}, {bat_p, -1.0}});
        b.add_row(-inf, 0.0, {{dis_col[t], 1.0}, {bat_p, -1.0}});
        b.add_row(-inf, 0.0, {{soc_col[t], 1.0}, {bat_e, -1.0}});
        b.add_row(0.0, 0.0,
                  {{soc_col[t], 1.0}, {soc_col[prev], -1.0}, {ch_col[t], -p.eta}, {dis_col[t], 1.0 / p.eta}});
    }
    for (std::size_t t = 0; t < T; ++t)
        b.push(e_col[t], 1.0);
    b.close_row(p.target(), p.target());

    Highs highs;
    configure(highs);
    if (highs.passModel(b.finish()) == HighsStatus::kError)
        throw ContractViolation(in.region_id + ": LP assembly rejected by the solver");
    highs.run();
    const auto status = highs.getModelStatus();
    if (status == HighsModelStatus::kInfeasible)
        throw InfeasibleError(in.region_id + ": hydrogen target infeasible", ceiling_summary(in));
    if (status != HighsModelStatus::kOptimal)
        throw ContractViolation(in.region_id + ": LP solve ended with status "
                                + highs.modelStatusToString(status));
    const auto& v = highs.getSolution().col_value;
    auto pos = [&](int c) { return std::max(0.0, v[static_cast<std::size_t>(c)]); };

    Dispatch d;
    for (int c : y_col)
        d.y.push_back(pos(c));
    d.dispatched.resize(n);
    for (std::size_t t = 0; t < T; ++t) {
        d.e.push_back(pos(e_col[t]));
        d.charge.push_back(pos(ch_col[t]));
        d.discharge.push_back(pos(dis_col[t]));
    }
    for (std::size_t k = 0; k < n; ++k)
        for (int c : g_col[k])
            d.dispatched[k].push_back(pos(c));
    return d;
}

SystemDesign assemble(const RegionSystemInputs& in, const Scaled& p, const Dispatch& d, double target_kg)
{
    const std::size_t T = p.hours, n = p.n;
    const double u = p.unit_mw;
    const double years = static_cast<double>(T) / static_cast<double>(res_sim::kHoursPerYear);

    SystemDesign s;
    s.region_id = in.region_id;
    s.target_h2_kg = target_kg;
    for (std::size_t k = 0; k < n; ++k)
        s.capacity_mw[in.technologies[k].technology] += d.y[k] * u;
    s.electrolyzer_mw = d.y[p.E()] * u;
    s.battery_mwh = d.y[p.B()] * u;
    s.battery_mw = d.y[p.P()] * u;

    CompensatedSum gen, e_sum, curtailed, charged, discharged;
    for (std::size_t t = 0; t < T; ++t) {
        double g = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            g += in.technologies[k].dispatchable ? d.dispatched[k][t] : (*p.cf[k])[t] * d.y[k];
        g *= u;
        const double e = d.e[t] * u, ch = d.charge[t] * u, dis = d.discharge[t] * u;
        gen.add(g);
        e_sum.add(e);
        charged.add(ch);
        discharged.add(dis);
        curtailed.add(g + dis - ch - e);
    }
    s.generation_mwh = gen.value() / years;
    s.electrolyzer_input_mwh = e_sum.value() / years;
    s.curtailed_mwh = std::max(0.0, curtailed.value() / years);
    s.battery_loss_mwh = (charged.value() - discharged.value()) / years;
    s.curtailed_share = s.generation_mwh > 0.0 ? s.curtailed_mwh / s.generation_mwh : 0.0;
    s.annual_h2_kg = s.electrolyzer_input_mwh * 1000.0 / in.efficiency_kwh_per_kg;
    s.electrolyzer_flh = s.electrolyzer_mw > 0.0 ? s.electrolyzer_input_mwh / s.electrolyzer_mw : 0.0;

    CompensatedSum cost;
    for (std::size_t j = 0; j < p.size(); ++j)
        cost.add(d.y[j] * u * 1000.0 * p.cost[j]);
    s.system_cost_eur = cost.value();
    s.water_m3 = water::water_demand_m3(s.annual_h2_kg, in.water_use_l_per_kg);
    s.water_cost_eur = water_cost(in, s.annual_h2_kg);
    s.water_cost_share = s.water_cost_eur / s.total_cost_eur();
    s.lcoh_eur_per_kg = s.total_cost_eur() / s.annual_h2_kg;
    return s;
}

Scaled prepare(const RegionSystemInputs& in, double h2_target_kg)
{
    in.validate();
    if (!(h2_target_kg > 0.0) || !std::isfinite(h2_target_kg))
        throw ContractViolation("optimize_system: hydrogen target must be positive");
    if (in.technologies.empty())
        throw InfeasibleError(in.region_id + ": no generation technology offered", "no technologies");
    const std::size_t T = in.hours();
    const double years = static_cast<double>(T) / static_cast<double>(res_sim::kHoursPerYear);
    const double target_mwh = h2_target_kg * in.efficiency_kwh_per_kg / 1000.0;
    const double max_mwh = in.max_generation_mwh();
    if (target_mwh > max_mwh * (1.0 + 1e-9))
        throw InfeasibleError(in.region_id + ": target " + format_number(target_mwh) + " MWh exceeds generable "
                                  + format_number(max_mwh) + " MWh",
                              ceiling_summary(in));
    return scale_inputs(in, target_mwh * years / static_cast<double>(T));
}

} // namespace

SystemDesign optimize_system(const RegionSystemInputs& in, double h2_target_kg)
{
    const Scaled p = prepare(in, h2_target_kg);
    const ThroughputModel model(p);
    auto y = solve_first_stage(p, model, in.region_id);
    return assemble(in, p, schedule(in, p, model, std::move(y)), h2_target_kg);
}

SystemDesign optimize_system_reference_lp(const RegionSystemInputs& in, double h2_target_kg)
{
    const Scaled p = prepare(in, h2_target_kg);
    return assemble(in, p, solve_lp(in, p), h2_target_kg);
}

} // namespace h2atlas::h2opt
