#pragma once

#include <cmath>
#include <span>

namespace h2atlas {

/// Neumaier-compensated accumulator. Sums of long hourly series and of
/// per-cell quantities go through this so results do not depend on how a
/// caller chunks the data.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }

    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept
{
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    return s.value();
}

inline double compensated_mean(std::span<const double> xs) noexcept
{
    return xs.empty() ? 0.0 : compensated_sum(xs) / static_cast<double>(xs.size());
}

} // namespace h2atlas
