#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>

#include "kcusum/observation.hpp"

namespace kcusum {

enum class KernelFamily { Gaussian };

/// Kernel family plus the metadata the bounds need: the sup-norm of k and
/// whether k takes only nonnegative values.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double sigma2 = 1.0;
    double sup_bound = 1.0;
    bool nonnegative = true;

    /// k(x,y) = exp(-|x-y|^2 / (2 sigma2)); sigma2 = 1 is the textbook form.
    static KernelSpec gaussian(double sigma2 = 1.0);

    /// Throws ConfigError when the fields are inconsistent with the family.
    void validate() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

[[nodiscard]] std::string_view to_string(KernelFamily family);

/// Parses "gaussian" (case-sensitive). Throws ConfigError otherwise.
[[nodiscard]] KernelFamily parse_kernel_family(std::string_view name);

/// k(x,y). Throws InputError on a dimension mismatch.
[[nodiscard]] double kernel_eval(const KernelSpec& spec, const Observation& x, const Observation& y);

/// Hot-path form without validation; x and y must have equal length.
[[nodiscard]] inline double kernel_eval_unchecked(const KernelSpec& spec, std::span<const double> x,
                                                  std::span<const double> y) noexcept {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        dist2 += d * d;
    }
    // Only the Gaussian family exists today.
    return std::exp(-dist2 / (2.0 * spec.sigma2));
}

}  // namespace kcusum
