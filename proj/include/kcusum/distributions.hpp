#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kcusum/observation.hpp"
#include "kcusum/rng.hpp"

namespace kcusum {

enum class DistributionKind { DiagonalGaussian, ComponentScaledGaussian, ComponentwiseUniform };

[[nodiscard]] std::string_view to_string(DistributionKind kind);

/// Immutable, sampleable law on R^dim.
///
/// - DiagonalGaussian: independent N(mean_i, variances_i).
/// - ComponentScaledGaussian: draw from the diagonal Gaussian base, then pick one
///   coordinate uniformly at random (or the fixed one, if configured) and multiply
///   its value by scale_factor.
/// - ComponentwiseUniform: independent Uniform[mean_i - half_width, mean_i + half_width].
class Distribution {
public:
    static Distribution diagonal_gaussian(std::vector<double> mean, std::vector<double> variances);
    /// Isotropic shorthand: every coordinate has the same mean and variance.
    static Distribution diagonal_gaussian(std::size_t dim, double mean, double variance);
    static Distribution component_scaled_gaussian(std::vector<double> mean, std::vector<double> variances,
                                                  double scale_factor,
                                                  std::optional<std::size_t> fixed_component = std::nullopt);
    static Distribution componentwise_uniform(std::vector<double> mean, double half_width);
    static Distribution componentwise_uniform(std::size_t dim, double half_width);

    [[nodiscard]] DistributionKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return mean_.size(); }
    [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }
    /// Base variances (Gaussian kinds); empty for the uniform kind.
    [[nodiscard]] const std::vector<double>& variances() const noexcept { return variances_; }
    [[nodiscard]] double scale_factor() const noexcept { return scale_factor_; }
    [[nodiscard]] std::optional<std::size_t> fixed_component() const noexcept { return fixed_component_; }
    [[nodiscard]] double half_width() const noexcept { return half_width_; }

    /// Exact per-coordinate variance of a draw.
    [[nodiscard]] double component_variance(std::size_t i) const;

    [[nodiscard]] Observation sample(Rng& rng) const;
    /// Overwrites `out` with a fresh draw, reusing its storage.
    void sample_into(Rng& rng, Observation& out) const;

    /// One-line human-readable descriptor.
    [[nodiscard]] std::string describe() const;

private:
    Distribution() = default;

    DistributionKind kind_ = DistributionKind::DiagonalGaussian;
    std::vector<double> mean_;
    std::vector<double> variances_;
    std::vector<double> stddevs_;
    double scale_factor_ = 1.0;
    std::optional<std::size_t> fixed_component_;
    double half_width_ = 0.0;
};

/// Pointwise log f1(x)/f0(x) for two diagonal Gaussians, stored as per-coordinate
/// quadratic coefficients: sum_i a_i x_i^2 + b_i x_i + c_i.
class LogDensityRatioModel {
public:
    /// Both laws must be DiagonalGaussian of equal dimension; throws ConfigError otherwise.
    static LogDensityRatioModel gaussian(const Distribution& pre, const Distribution& post);

    [[nodiscard]] std::size_t dim() const noexcept { return quad_.size(); }
    /// Throws InputError on dimension mismatch.
    [[nodiscard]] double operator()(const Observation& x) const;
    [[nodiscard]] double evaluate_unchecked(std::span<const double> x) const noexcept;

private:
    std::vector<double> quad_;
    std::vector<double> lin_;
    double constant_ = 0.0;
};

/// log N(x;1,4)/N(x;1,1) = (3/8)x^2 - (3/4)x + log(1/2) + 3/8.
[[nodiscard]] double llr_gaussian_variance_change(double x);

/// KL(p || q) for diagonal Gaussians, summed over coordinates. Throws ConfigError
/// if either argument is not DiagonalGaussian or the dimensions differ.
[[nodiscard]] double kl_divergence_gaussian(const Distribution& p, const Distribution& q);

/// The four change scenarios on R^4 with pre-change law N(0, I/2).
enum class BenchmarkTask { MeanShift = 1, VarianceAll = 2, VarianceRandomComponent = 3, UniformMatched = 4 };

struct BenchmarkOptions {
    /// Half width of the uniform post-change law; the literal default is 1/(2 sqrt 3).
    double uniform_half_width = 0.28867513459481287;
    /// Redraw the scaled coordinate on every observation (false: always coordinate 0).
    bool redraw_component = true;
};

/// Half width giving the same per-coordinate variance (1/2) as the pre-change law.
inline constexpr double kVarianceMatchedHalfWidth = 1.2247448713915890;

[[nodiscard]] BenchmarkTask benchmark_task_from_int(int id);
[[nodiscard]] std::string_view to_string(BenchmarkTask task);
[[nodiscard]] Distribution benchmark_pre_change();
[[nodiscard]] Distribution benchmark_post_change(BenchmarkTask task, const BenchmarkOptions& options = {});
/// 2^-7 for tasks 1-3, 2^-9 for task 4.
[[nodiscard]] double benchmark_default_delta(BenchmarkTask task);

/// Variance-change scenario N(1,1) -> N(1,4) on R^1.
[[nodiscard]] Distribution variance_change_pre();
[[nodiscard]] Distribution variance_change_post();

}  // namespace kcusum
