#pragma once

#include <cmath>

namespace rccat::detail {

__extension__ using int128 = __int128;

// Fixed-point accumulator for psi values (|v| <= log 2) with 2^-100 resolution.
// Every double of magnitude >= 2^-48 converts exactly, so sums, sliding
// updates and differences are exact and independent of summation order.
// Capacity is about 2^26 terms of magnitude log 2.
class ExactSum {
public:
    void add(double v) noexcept { acc_ += to_fixed(v); }
    void sub(double v) noexcept { acc_ -= to_fixed(v); }

    double value() const noexcept { return to_double(acc_); }

    /// Exact difference, rounded once.
    friend double difference(const ExactSum& a, const ExactSum& b) noexcept { return to_double(a.acc_ - b.acc_); }

private:
    static constexpr int kShift = 100;

    static int128 to_fixed(double v) noexcept { return static_cast<int128>(std::ldexp(v, kShift)); }
    static double to_double(int128 a) noexcept { return std::ldexp(static_cast<double>(a), -kShift); }

    int128 acc_ = 0;
};

} // namespace rccat::detail
