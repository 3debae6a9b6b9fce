#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rccat {

/// Ordered real observations with optional strictly increasing timestamps.
///
/// Positions are 1-based in every public index (change points, scan indices):
/// observation t lives at values()[t - 1].
class TimeSeries {
public:
    TimeSeries() = default;

    explicit TimeSeries(std::vector<double> values, std::optional<std::vector<double>> timestamps = std::nullopt)
        : values_(std::move(values)), timestamps_(std::move(timestamps)) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw std::domain_error("TimeSeries: non-finite value at position " + std::to_string(i + 1));
        }
        if (timestamps_) {
            if (timestamps_->size() != values_.size())
                throw std::domain_error("TimeSeries: timestamp count does not match value count");
            for (std::size_t i = 1; i < timestamps_->size(); ++i) {
                if (!((*timestamps_)[i] > (*timestamps_)[i - 1]))
                    throw std::domain_error("TimeSeries: timestamps must strictly increase (position " +
                                            std::to_string(i + 1) + ")");
            }
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const double> values() const noexcept { return values_; }
    const std::optional<std::vector<double>>& timestamps() const noexcept { return timestamps_; }

    /// 1-based access.
    double at(std::size_t t) const {
        if (t == 0 || t > values_.size()) throw std::out_of_range("TimeSeries::at: position out of range");
        return values_[t - 1];
    }

    /// Observations first..last inclusive, 1-based.
    std::span<const double> slice(std::size_t first, std::size_t last) const {
        if (first == 0 || last < first || last > values_.size())
            throw std::out_of_range("TimeSeries::slice: bad range");
        return std::span<const double>(values_).subspan(first - 1, last - first + 1);
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    std::optional<std::vector<double>> timestamps_;
};

} // namespace rccat
