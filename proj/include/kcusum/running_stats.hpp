#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace kcusum {

/// Welford accumulator for mean / variance, mergeable in a fixed order.
class RunningStats {
public:
    void push(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStats& other) noexcept {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(other.n_);
        const double nt = na + nb;
        const double d = other.mean_ - mean_;
        mean_ += d * (nb / nt);
        m2_ += other.m2_ + d * d * (na * nb / nt);
        n_ += other.n_;
    }

    [[nodiscard]] std::size_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept {
        return n_ ? mean_ : std::numeric_limits<double>::quiet_NaN();
    }
    /// Unbiased sample variance; NaN below two samples.
    [[nodiscard]] double variance() const noexcept {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : std::numeric_limits<double>::quiet_NaN();
    }
    [[nodiscard]] double stddev() const noexcept { return std::sqrt(variance()); }
    /// Standard error of the mean; 0 for a single sample, NaN for none.
    [[nodiscard]] double std_error() const noexcept {
        if (n_ == 0) return std::numeric_limits<double>::quiet_NaN();
        if (n_ == 1) return 0.0;
        return std::sqrt(variance() / static_cast<double>(n_));
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace kcusum
