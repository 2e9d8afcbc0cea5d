#include "kcusum/observation.hpp"

#include <cmath>
#include <string>

#include "kcusum/error.hpp"

namespace kcusum {

namespace {

void validate(const std::vector<double>& values) {
    if (values.empty()) {
        throw InputError("observation must have dim >= 1");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InputError("observation coordinate " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace

Observation::Observation(std::vector<double> values) : values_(std::move(values)) {
    validate(values_);
}

Observation::Observation(std::initializer_list<double> values) : values_(values) {
    validate(values_);
}

Observation Observation::zeros(std::size_t dim) {
    if (dim == 0) {
        throw InputError("observation must have dim >= 1");
    }
    Observation obs;
    obs.values_.assign(dim, 0.0);
    return obs;
}

void require_same_dim(const Observation& a, const Observation& b) {
    if (a.dim() != b.dim()) {
        throw InputError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
    }
}

}  // namespace kcusum
