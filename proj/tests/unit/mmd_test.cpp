#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kcusum/error.hpp"
#include "kcusum/mmd.hpp"
#include "kcusum/running_stats.hpp"

using namespace kcusum;

namespace {

double k_ref(const Observation& a, const Observation& b) {
    double d2 = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-d2 / 2.0);
}

// E exp(-|x-y|^2 / 2) for x ~ N(m1, s1 I), y ~ N(m2, s2 I) in R^d, per coordinate product.
double gauss_cross(double m1, double s1, double m2, double s2, int d) {
    const double t = 1.0 + s1 + s2;
    return std::pow(1.0 / t, d / 2.0) * std::exp(-d * (m1 - m2) * (m1 - m2) / (2.0 * t));
}

double closed_form_mmd2(double m1, double s1, double m2, double s2, int d) {
    return gauss_cross(m1, s1, m1, s1, d) + gauss_cross(m2, s2, m2, s2, d) - 2 * gauss_cross(m1, s1, m2, s2, d);
}

}  // namespace

TEST(GStatistic, MatchesDirectFormula) {
    Rng r(11);
    const auto spec = KernelSpec::gaussian();
    const auto law = Distribution::diagonal_gaussian(3, 0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto x0 = law.sample(r), x1 = law.sample(r), y0 = law.sample(r), y1 = law.sample(r);
        const double want = k_ref(x0, x1) + k_ref(y0, y1) - k_ref(x0, y1) - k_ref(x1, y0);
        ASSERT_NEAR(g_statistic(spec, PairBlock(x0, x1, y0, y1)), want, 1e-14);
    }
}

TEST(GStatistic, CancellationCases) {
    const auto spec = KernelSpec::gaussian();
    const Observation a{0.2, -0.4}, b{1.1, 0.5};
    EXPECT_EQ(g_statistic(spec, PairBlock(a, a, a, a)), 0.0);
    // Reference pair equal to the stream pair, crossed: g = 2k(a,b) - 2.
    EXPECT_NEAR(g_statistic(spec, PairBlock(a, b, b, a)), 2 * k_ref(a, b) - 2, 1e-15);
    // Reference pair identical to the stream pair: every term is k(a,b).
    EXPECT_NEAR(g_statistic(spec, PairBlock(a, b, a, b)), 0.0, 1e-15);
}

TEST(GDelta, SubtractsDelta) {
    const auto spec = KernelSpec::gaussian();
    const Observation a{1.0};
    EXPECT_DOUBLE_EQ(g_delta(spec, PairBlock(a, a, a, a), 1.0 / 40.0), -0.025);
    EXPECT_THROW((void)g_delta(spec, PairBlock(a, a, a, a), 0.0), ConfigError);
    EXPECT_THROW((void)g_delta(spec, PairBlock(a, a, a, a), -1.0), ConfigError);
}

TEST(PairBlock, RejectsMixedDimensions) {
    EXPECT_THROW(PairBlock(Observation{1.0}, Observation{1.0}, Observation{1.0, 2.0}, Observation{1.0}), InputError);
}

TEST(RhoLinear, MeanOverDisjointPairsDropsOddTail) {
    Rng r(12);
    const auto spec = KernelSpec::gaussian();
    const auto law = Distribution::diagonal_gaussian(2, 0.0, 1.0);
    std::vector<Observation> xs, ys;
    for (int i = 0; i < 7; ++i) {
        xs.push_back(law.sample(r));
        ys.push_back(law.sample(r));
    }
    double want = 0;
    for (int i = 0; i < 3; ++i) {
        const auto &x0 = xs[2 * i], &x1 = xs[2 * i + 1], &y0 = ys[2 * i], &y1 = ys[2 * i + 1];
        want += k_ref(x0, x1) + k_ref(y0, y1) - k_ref(x0, y1) - k_ref(x1, y0);
    }
    EXPECT_NEAR(rho_linear(spec, xs, ys), want / 3, 1e-14);
}

TEST(RhoLinear, InputErrors) {
    const auto spec = KernelSpec::gaussian();
    std::vector<Observation> one{Observation{1.0}};
    std::vector<Observation> two{Observation{1.0}, Observation{2.0}};
    std::vector<Observation> three{Observation{1.0}, Observation{2.0}, Observation{3.0}};
    std::vector<Observation> wide{Observation{1.0, 0.0}, Observation{2.0, 0.0}};
    EXPECT_THROW((void)rho_linear(spec, one, one), InputError);
    EXPECT_THROW((void)rho_linear(spec, two, three), InputError);
    EXPECT_THROW((void)rho_linear(spec, two, wide), InputError);
}

TEST(RhoLinear, UnbiasedForClosedFormMmd) {
    const auto spec = KernelSpec::gaussian();
    const auto p = benchmark_pre_change();
    const auto q = benchmark_post_change(BenchmarkTask::MeanShift);
    Rng r(13);
    RunningStats s;
    for (int rep = 0; rep < 3000; ++rep) {
        std::vector<Observation> xs, ys;
        for (int i = 0; i < 20; ++i) {
            xs.push_back(p.sample(r));
            ys.push_back(q.sample(r));
        }
        s.push(rho_linear(spec, xs, ys));
    }
    EXPECT_NEAR(s.mean(), closed_form_mmd2(0.0, 0.5, 1.0, 0.5, 4), 4 * s.std_error());
}

TEST(Mmd2Oracle, MatchesClosedForms) {
    const auto spec = KernelSpec::gaussian();
    const auto p = benchmark_pre_change();
    struct Case {
        BenchmarkTask task;
        double m2, s2;
    };
    for (const Case c : {Case{BenchmarkTask::MeanShift, 1.0, 0.5}, Case{BenchmarkTask::VarianceAll, 0.0, 2.0}}) {
        const auto est = mmd2_oracle(spec, p, benchmark_post_change(c.task), 200000, 21, 2);
        EXPECT_NEAR(est.estimate, closed_form_mmd2(0.0, 0.5, c.m2, c.s2, 4), 4 * est.std_error);
        EXPECT_EQ(est.n_samples, 200000u);
    }
    EXPECT_NEAR(closed_form_mmd2(0.0, 0.5, 1.0, 0.5, 4), 0.5 - 0.5 * std::exp(-1.0), 1e-15);
}

TEST(Mmd2Oracle, EqualLawsGiveZeroAndSymmetry) {
    const auto spec = KernelSpec::gaussian();
    const auto p = benchmark_pre_change();
    const auto q = benchmark_post_change(BenchmarkTask::VarianceAll);
    const auto same = mmd2_oracle(spec, p, p, 100000, 3, 1);
    EXPECT_NEAR(same.estimate, 0.0, 4 * same.std_error);
    const auto pq = mmd2_oracle(spec, p, q, 100000, 4, 1);
    const auto qp = mmd2_oracle(spec, q, p, 100000, 5, 1);
    EXPECT_NEAR(pq.estimate, qp.estimate, 6 * std::hypot(pq.std_error, qp.std_error));
}

TEST(Mmd2Oracle, DeterministicAcrossThreadCounts) {
    const auto spec = KernelSpec::gaussian();
    const auto p = benchmark_pre_change();
    const auto q = benchmark_post_change(BenchmarkTask::VarianceRandomComponent);
    const auto a = mmd2_oracle(spec, p, q, 70000, 99, 1);
    const auto b = mmd2_oracle(spec, p, q, 70000, 99, 3);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_NE(a.estimate, mmd2_oracle(spec, p, q, 70000, 100, 1).estimate);
    EXPECT_THROW((void)mmd2_oracle(spec, p, q, 9999, 1, 1), InputError);
}

TEST(GDelta, DriftSignsBeforeAndAfterChange) {
    const auto spec = KernelSpec::gaussian();
    const double delta = std::ldexp(1.0, -7);
    const auto p = benchmark_pre_change();
    const auto q = benchmark_post_change(BenchmarkTask::MeanShift);
    Rng r(31);
    RunningStats pre, post;
    for (int i = 0; i < 40000; ++i) {
        const auto x0 = p.sample(r), x1 = p.sample(r), y0 = p.sample(r), y1 = p.sample(r);
        pre.push(g_delta(spec, PairBlock(x0, x1, y0, y1), delta));
        const auto u0 = q.sample(r), u1 = q.sample(r);
        post.push(g_delta(spec, PairBlock(u0, u1, y0, y1), delta));
    }
    EXPECT_NEAR(pre.mean(), -delta, 4 * pre.std_error());
    EXPECT_NEAR(post.mean(), closed_form_mmd2(0.0, 0.5, 1.0, 0.5, 4) - delta, 4 * post.std_error());
}
