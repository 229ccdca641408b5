#pragma once

#include <cmath>

namespace doubletscope {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace doubletscope
