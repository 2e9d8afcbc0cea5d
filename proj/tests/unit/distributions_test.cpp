#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kcusum/distributions.hpp"
#include "kcusum/error.hpp"
#include "kcusum/running_stats.hpp"

using namespace kcusum;

namespace {

double normal_pdf(double x, double m, double v) {
    return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
}

// Composite Simpson rule on [lo, hi].
template <class F>
double simpson(F f, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

std::vector<RunningStats> coordinate_stats(const Distribution& d, int n, std::uint64_t seed) {
    Rng r(seed);
    std::vector<RunningStats> out(d.dim());
    for (int i = 0; i < n; ++i) {
        const auto x = d.sample(r);
        for (std::size_t j = 0; j < d.dim(); ++j) out[j].push(x[j]);
    }
    return out;
}

}  // namespace

TEST(DiagonalGaussian, SampleMoments) {
    const auto d = Distribution::diagonal_gaussian({1.0, -2.0, 0.0}, {0.5, 2.0, 4.0});
    const auto st = coordinate_stats(d, 200000, 1);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(st[j].mean(), d.mean()[j], 5 * st[j].std_error());
        EXPECT_NEAR(st[j].variance(), d.variances()[j], 0.02 * d.variances()[j] + 0.005);
        EXPECT_EQ(d.component_variance(j), d.variances()[j]);
    }
}

TEST(DiagonalGaussian, RejectsBadParameters) {
    EXPECT_THROW((void)Distribution::diagonal_gaussian({0.0}, {0.0}), ConfigError);
    EXPECT_THROW((void)Distribution::diagonal_gaussian({0.0, 1.0}, {1.0}), ConfigError);
    EXPECT_THROW((void)Distribution::diagonal_gaussian(std::vector<double>{}, std::vector<double>{}), ConfigError);
    EXPECT_THROW((void)Distribution::diagonal_gaussian(0, 0.0, 1.0), ConfigError);
}

TEST(ComponentwiseUniform, BoundsAndVariance) {
    const double hw = 1.0 / (2.0 * std::sqrt(3.0));
    const auto d = benchmark_post_change(BenchmarkTask::UniformMatched);
    EXPECT_EQ(d.kind(), DistributionKind::ComponentwiseUniform);
    EXPECT_NEAR(d.half_width(), hw, 1e-16);
    EXPECT_NEAR(d.component_variance(0), 1.0 / 36.0, 1e-15);
    Rng r(2);
    RunningStats s;
    for (int i = 0; i < 100000; ++i) {
        const auto x = d.sample(r);
        for (std::size_t j = 0; j < 4; ++j) {
            ASSERT_GE(x[j], -hw);
            ASSERT_LE(x[j], hw);
        }
        s.push(x[0]);
    }
    EXPECT_NEAR(s.variance(), 1.0 / 36.0, 0.001);
    EXPECT_THROW((void)Distribution::componentwise_uniform(2, 0.0), ConfigError);
}

TEST(ComponentwiseUniform, VarianceMatchedHalfWidth) {
    BenchmarkOptions opts;
    opts.uniform_half_width = kVarianceMatchedHalfWidth;
    const auto d = benchmark_post_change(BenchmarkTask::UniformMatched, opts);
    EXPECT_NEAR(d.component_variance(0), 0.5, 1e-15);
}

TEST(ComponentScaledGaussian, MixtureVariance) {
    const auto d = benchmark_post_change(BenchmarkTask::VarianceRandomComponent);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(d.component_variance(j), 0.875, 1e-15);
    const auto st = coordinate_stats(d, 200000, 3);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(st[j].mean(), 0.0, 5 * st[j].std_error());
        EXPECT_NEAR(st[j].variance(), 0.875, 0.02);
    }
}

TEST(ComponentScaledGaussian, FixedComponent) {
    BenchmarkOptions opts;
    opts.redraw_component = false;
    const auto d = benchmark_post_change(BenchmarkTask::VarianceRandomComponent, opts);
    ASSERT_EQ(d.fixed_component(), std::optional<std::size_t>(0));
    EXPECT_NEAR(d.component_variance(0), 2.0, 1e-15);
    EXPECT_NEAR(d.component_variance(1), 0.5, 1e-15);
    const auto st = coordinate_stats(d, 100000, 4);
    EXPECT_NEAR(st[0].variance(), 2.0, 0.05);
    EXPECT_NEAR(st[3].variance(), 0.5, 0.015);
    EXPECT_THROW((void)Distribution::component_scaled_gaussian({0.0}, {1.0}, 2.0, 1), ConfigError);
}

TEST(BenchmarkTasks, Laws) {
    const auto pre = benchmark_pre_change();
    EXPECT_EQ(pre.dim(), 4u);
    EXPECT_EQ(pre.mean(), std::vector<double>(4, 0.0));
    EXPECT_EQ(pre.variances(), std::vector<double>(4, 0.5));
    const auto t1 = benchmark_post_change(BenchmarkTask::MeanShift);
    EXPECT_EQ(t1.mean(), std::vector<double>(4, 1.0));
    EXPECT_EQ(t1.variances(), std::vector<double>(4, 0.5));
    const auto t2 = benchmark_post_change(BenchmarkTask::VarianceAll);
    EXPECT_EQ(t2.variances(), std::vector<double>(4, 2.0));
    EXPECT_EQ(benchmark_default_delta(BenchmarkTask::MeanShift), std::ldexp(1.0, -7));
    EXPECT_EQ(benchmark_default_delta(BenchmarkTask::VarianceRandomComponent), std::ldexp(1.0, -7));
    EXPECT_EQ(benchmark_default_delta(BenchmarkTask::UniformMatched), std::ldexp(1.0, -9));
    EXPECT_EQ(benchmark_task_from_int(3), BenchmarkTask::VarianceRandomComponent);
    EXPECT_THROW((void)benchmark_task_from_int(0), ConfigError);
    EXPECT_THROW((void)benchmark_task_from_int(5), ConfigError);
}

TEST(LogDensityRatio, VarianceChangeValues) {
    EXPECT_NEAR(llr_gaussian_variance_change(1.0), -std::log(2.0), 1e-15);
    EXPECT_NEAR(llr_gaussian_variance_change(0.0), 0.375 - std::log(2.0), 1e-15);
    EXPECT_NEAR(llr_gaussian_variance_change(0.0), -0.318147, 1e-6);
    for (double x : {-3.0, -0.5, 0.7, 2.0, 5.5}) {
        const double want = std::log(normal_pdf(x, 1, 4) / normal_pdf(x, 1, 1));
        EXPECT_NEAR(llr_gaussian_variance_change(x), want, 1e-12);
    }
}

TEST(LogDensityRatio, ModelMatchesDensities) {
    const auto pre = Distribution::diagonal_gaussian({0.0, 1.0}, {0.5, 2.0});
    const auto post = Distribution::diagonal_gaussian({1.0, -1.0}, {1.5, 0.25});
    const auto llr = LogDensityRatioModel::gaussian(pre, post);
    Rng r(6);
    for (int i = 0; i < 100; ++i) {
        const Observation x{r.normal() * 2, r.normal() * 2};
        const double want = std::log(normal_pdf(x[0], 1.0, 1.5) / normal_pdf(x[0], 0.0, 0.5)) +
                            std::log(normal_pdf(x[1], -1.0, 0.25) / normal_pdf(x[1], 1.0, 2.0));
        ASSERT_NEAR(llr(x), want, 1e-10);
    }
    EXPECT_THROW((void)llr(Observation{1.0}), InputError);
    EXPECT_THROW((void)LogDensityRatioModel::gaussian(pre, Distribution::componentwise_uniform(2, 1.0)), ConfigError);

    const auto ex1 = LogDensityRatioModel::gaussian(variance_change_pre(), variance_change_post());
    for (double x : {-2.0, 0.0, 1.0, 3.25}) EXPECT_NEAR(ex1(Observation{x}), llr_gaussian_variance_change(x), 1e-14);
}

TEST(KlDivergence, ClosedFormMatchesQuadrature) {
    const auto p0 = variance_change_pre();
    const auto p1 = variance_change_post();
    // Log densities in closed form so the tails do not underflow inside the log.
    auto log_pdf = [](double x, double m, double v) { return -0.5 * std::log(2 * M_PI * v) - (x - m) * (x - m) / (2 * v); };
    const double kl10 = simpson(
        [&](double x) { return normal_pdf(x, 1, 4) * (log_pdf(x, 1, 4) - log_pdf(x, 1, 1)); }, -40, 42);
    const double kl01 = simpson(
        [&](double x) { return normal_pdf(x, 1, 1) * (log_pdf(x, 1, 1) - log_pdf(x, 1, 4)); }, -20, 22);
    EXPECT_NEAR(kl_divergence_gaussian(p1, p0), kl10, 1e-9);
    EXPECT_NEAR(kl_divergence_gaussian(p0, p1), kl01, 1e-9);
    EXPECT_NEAR(kl_divergence_gaussian(p1, p0), 0.806853, 1e-6);
    EXPECT_NEAR(kl_divergence_gaussian(p0, p1), 0.318147, 1e-6);
    EXPECT_EQ(kl_divergence_gaussian(p0, p0), 0.0);
    EXPECT_THROW((void)kl_divergence_gaussian(p0, benchmark_pre_change()), ConfigError);
}

TEST(Sampling, SeedDeterminism) {
    for (const auto& d : {benchmark_post_change(BenchmarkTask::MeanShift),
                          benchmark_post_change(BenchmarkTask::VarianceRandomComponent),
                          benchmark_post_change(BenchmarkTask::UniformMatched)}) {
        Rng a(77, {1}), b(77, {1});
        Observation buf = Observation::zeros(d.dim());
        for (int i = 0; i < 500; ++i) {
            const auto x = d.sample(a);
            d.sample_into(b, buf);
            ASSERT_EQ(x, buf);
        }
    }
}

TEST(Describe, MentionsKind) {
    EXPECT_NE(benchmark_pre_change().describe().find("gaussian_diag"), std::string::npos);
    EXPECT_NE(benchmark_post_change(BenchmarkTask::UniformMatched).describe().find("uniform"), std::string::npos);
}
