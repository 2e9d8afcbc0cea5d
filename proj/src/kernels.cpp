#include "kcusum/kernels.hpp"

#include <cmath>
#include <string>

#include "kcusum/error.hpp"

namespace kcusum {

KernelSpec KernelSpec::gaussian(double sigma2) {
    KernelSpec spec{KernelFamily::Gaussian, sigma2, 1.0, true};
    spec.validate();
    return spec;
}

void KernelSpec::validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ConfigError("kernel sigma2 must be a positive finite number");
    }
    if (!(sup_bound > 0.0) || !std::isfinite(sup_bound)) {
        throw ConfigError("kernel sup_bound must be a positive finite number");
    }
    switch (family) {
        case KernelFamily::Gaussian:
            if (sup_bound != 1.0 || !nonnegative) {
                throw ConfigError("gaussian kernel has sup_bound = 1 and is nonnegative");
            }
            break;
    }
}

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian:
            return "gaussian";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "gaussian") {
        return KernelFamily::Gaussian;
    }
    throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

double kernel_eval(const KernelSpec& spec, const Observation& x, const Observation& y) {
    require_same_dim(x, y);
    return kernel_eval_unchecked(spec, x.values(), y.values());
}

}  // namespace kcusum
