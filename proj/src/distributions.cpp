#include "kcusum/distributions.hpp"

#include <cmath>
#include <sstream>

#include "kcusum/error.hpp"

namespace kcusum {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
    if (v.empty()) {
        throw ConfigError(std::string(what) + " must have dim >= 1");
    }
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ConfigError(std::string(what) + " must be finite");
        }
    }
}

void require_positive(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!(x > 0.0)) {
            throw ConfigError(std::string(what) + " must be strictly positive");
        }
    }
}

void append_vector(std::ostringstream& os, const std::vector<double>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? "," : "") << v[i];
    }
    os << ']';
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
    switch (kind) {
        case DistributionKind::DiagonalGaussian:
            return "gaussian_diag";
        case DistributionKind::ComponentScaledGaussian:
            return "gaussian_component_scaled";
        case DistributionKind::ComponentwiseUniform:
            return "uniform_componentwise";
    }
    return "unknown";
}

Distribution Distribution::diagonal_gaussian(std::vector<double> mean, std::vector<double> variances) {
    require_finite(mean, "mean");
    require_finite(variances, "variances");
    require_positive(variances, "variances");
    if (mean.size() != variances.size()) {
        throw ConfigError("mean and variances must have the same length");
    }
    Distribution d;
    d.kind_ = DistributionKind::DiagonalGaussian;
    d.mean_ = std::move(mean);
    d.variances_ = std::move(variances);
    d.stddevs_.reserve(d.variances_.size());
    for (double v : d.variances_) {
        d.stddevs_.push_back(std::sqrt(v));
    }
    return d;
}

Distribution Distribution::diagonal_gaussian(std::size_t dim, double mean, double variance) {
    return diagonal_gaussian(std::vector<double>(dim, mean), std::vector<double>(dim, variance));
}

Distribution Distribution::component_scaled_gaussian(std::vector<double> mean, std::vector<double> variances,
                                                     double scale_factor,
                                                     std::optional<std::size_t> fixed_component) {
    Distribution d = diagonal_gaussian(std::move(mean), std::move(variances));
    if (!std::isfinite(scale_factor)) {
        throw ConfigError("scale_factor must be finite");
    }
    if (fixed_component && *fixed_component >= d.dim()) {
        throw ConfigError("fixed_component out of range");
    }
    d.kind_ = DistributionKind::ComponentScaledGaussian;
    d.scale_factor_ = scale_factor;
    d.fixed_component_ = fixed_component;
    return d;
}

Distribution Distribution::componentwise_uniform(std::vector<double> mean, double half_width) {
    require_finite(mean, "mean");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw ConfigError("half_width must be a positive finite number");
    }
    Distribution d;
    d.kind_ = DistributionKind::ComponentwiseUniform;
    d.mean_ = std::move(mean);
    d.half_width_ = half_width;
    return d;
}

Distribution Distribution::componentwise_uniform(std::size_t dim, double half_width) {
    return componentwise_uniform(std::vector<double>(dim, 0.0), half_width);
}

double Distribution::component_variance(std::size_t i) const {
    if (i >= dim()) {
        throw InputError("component index out of range");
    }
    switch (kind_) {
        case DistributionKind::DiagonalGaussian:
            return variances_[i];
        case DistributionKind::ComponentScaledGaussian: {
            // Mixture over which coordinate gets scaled. Second moment of the
            // coordinate is (var + mean^2), scaled by s^2 with probability p.
            const double p = fixed_component_ ? (*fixed_component_ == i ? 1.0 : 0.0) : 1.0 / static_cast<double>(dim());
            const double m = mean_[i];
            const double s = scale_factor_;
            const double second = (variances_[i] + m * m) * ((1.0 - p) + p * s * s);
            const double first = m * ((1.0 - p) + p * s);
            return second - first * first;
        }
        case DistributionKind::ComponentwiseUniform:
            return half_width_ * half_width_ / 3.0;
    }
    return 0.0;
}

Observation Distribution::sample(Rng& rng) const {
    Observation out;
    sample_into(rng, out);
    return out;
}

void Distribution::sample_into(Rng& rng, Observation& out) const {
    const std::size_t n = dim();
    out.values_.resize(n);
    double* v = out.values_.data();
    switch (kind_) {
        case DistributionKind::DiagonalGaussian:
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = mean_[i] + stddevs_[i] * rng.normal();
            }
            break;
        case DistributionKind::ComponentScaledGaussian: {
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = mean_[i] + stddevs_[i] * rng.normal();
            }
            const std::size_t j = fixed_component_ ? *fixed_component_ : rng.index(n);
            v[j] *= scale_factor_;
            break;
        }
        case DistributionKind::ComponentwiseUniform:
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = rng.uniform(mean_[i] - half_width_, mean_[i] + half_width_);
            }
            break;
    }
}

std::string Distribution::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << " mean=";
    append_vector(os, mean_);
    switch (kind_) {
        case DistributionKind::DiagonalGaussian:
            os << " variances=";
            append_vector(os, variances_);
            break;
        case DistributionKind::ComponentScaledGaussian:
            os << " variances=";
            append_vector(os, variances_);
            os << " scale_factor=" << scale_factor_ << " component=";
            if (fixed_component_) {
                os << *fixed_component_;
            } else {
                os << "random";
            }
            break;
        case DistributionKind::ComponentwiseUniform:
            os << " half_width=" << half_width_;
            break;
    }
    return os.str();
}

LogDensityRatioModel LogDensityRatioModel::gaussian(const Distribution& pre, const Distribution& post) {
    if (pre.kind() != DistributionKind::DiagonalGaussian || post.kind() != DistributionKind::DiagonalGaussian) {
        throw ConfigError("log-density ratio model needs two diagonal Gaussian laws");
    }
    if (pre.dim() != post.dim()) {
        throw ConfigError("log-density ratio model: dimension mismatch");
    }
    LogDensityRatioModel m;
    const std::size_t n = pre.dim();
    m.quad_.resize(n);
    m.lin_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m0 = pre.mean()[i];
        const double v0 = pre.variances()[i];
        const double m1 = post.mean()[i];
        const double v1 = post.variances()[i];
        // log N(x;m1,v1) - log N(x;m0,v0)
        m.quad_[i] = 0.5 / v0 - 0.5 / v1;
        m.lin_[i] = m1 / v1 - m0 / v0;
        m.constant_ += 0.5 * std::log(v0 / v1) + 0.5 * m0 * m0 / v0 - 0.5 * m1 * m1 / v1;
    }
    return m;
}

double LogDensityRatioModel::operator()(const Observation& x) const {
    if (x.dim() != dim()) {
        throw InputError("llr model dimension " + std::to_string(dim()) + " does not match observation dimension " +
                         std::to_string(x.dim()));
    }
    return evaluate_unchecked(x.values());
}

double LogDensityRatioModel::evaluate_unchecked(std::span<const double> x) const noexcept {
    double acc = constant_;
    for (std::size_t i = 0; i < quad_.size(); ++i) {
        acc += (quad_[i] * x[i] + lin_[i]) * x[i];
    }
    return acc;
}

double llr_gaussian_variance_change(double x) {
    return 0.375 * x * x - 0.75 * x + std::log(0.5) + 0.375;
}

double kl_divergence_gaussian(const Distribution& p, const Distribution& q) {
    if (p.kind() != DistributionKind::DiagonalGaussian || q.kind() != DistributionKind::DiagonalGaussian) {
        throw ConfigError("closed-form KL needs diagonal Gaussian laws");
    }
    if (p.dim() != q.dim()) {
        throw ConfigError("KL divergence: dimension mismatch");
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const double vp = p.variances()[i];
        const double vq = q.variances()[i];
        const double dm = p.mean()[i] - q.mean()[i];
        kl += 0.5 * (std::log(vq / vp) + (vp + dm * dm) / vq - 1.0);
    }
    return kl;
}

BenchmarkTask benchmark_task_from_int(int id) {
    if (id < 1 || id > 4) {
        throw ConfigError("benchmark task must be 1..4, got " + std::to_string(id));
    }
    return static_cast<BenchmarkTask>(id);
}

std::string_view to_string(BenchmarkTask task) {
    switch (task) {
        case BenchmarkTask::MeanShift:
            return "mean_shift";
        case BenchmarkTask::VarianceAll:
            return "variance_all";
        case BenchmarkTask::VarianceRandomComponent:
            return "variance_random_component";
        case BenchmarkTask::UniformMatched:
            return "uniform_matched";
    }
    return "unknown";
}

Distribution benchmark_pre_change() {
    return Distribution::diagonal_gaussian(4, 0.0, 0.5);
}

Distribution benchmark_post_change(BenchmarkTask task, const BenchmarkOptions& options) {
    switch (task) {
        case BenchmarkTask::MeanShift:
            return Distribution::diagonal_gaussian(4, 1.0, 0.5);
        case BenchmarkTask::VarianceAll:
            return Distribution::diagonal_gaussian(4, 0.0, 2.0);
        case BenchmarkTask::VarianceRandomComponent:
            return Distribution::component_scaled_gaussian(
                std::vector<double>(4, 0.0), std::vector<double>(4, 0.5), 2.0,
                options.redraw_component ? std::nullopt : std::optional<std::size_t>(0));
        case BenchmarkTask::UniformMatched:
            return Distribution::componentwise_uniform(4, options.uniform_half_width);
    }
    throw ConfigError("unknown benchmark task");
}

double benchmark_default_delta(BenchmarkTask task) {
    return task == BenchmarkTask::UniformMatched ? std::ldexp(1.0, -9) : std::ldexp(1.0, -7);
}

Distribution variance_change_pre() {
    return Distribution::diagonal_gaussian(1, 1.0, 1.0);
}

Distribution variance_change_post() {
    return Distribution::diagonal_gaussian(1, 1.0, 4.0);
}

}  // namespace kcusum
