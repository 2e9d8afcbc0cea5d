#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kcusum {

class Distribution;

/// One element of a monitored stream: a finite real vector of fixed dimension.
class Observation {
public:
    /// Throws InputError if `values` is empty or holds a non-finite entry.
    explicit Observation(std::vector<double> values);
    Observation(std::initializer_list<double> values);

    /// Zero vector of the given dimension (dim >= 1).
    static Observation zeros(std::size_t dim);

    [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const Observation&, const Observation&) = default;

private:
    Observation() = default;

    // Sampling writes coordinates in place to avoid an allocation per draw.
    friend class Distribution;
    std::vector<double> values_;
};

/// Throws InputError unless both observations have the same dimension.
void require_same_dim(const Observation& a, const Observation& b);

}  // namespace kcusum
