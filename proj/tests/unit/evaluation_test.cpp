#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kcusum/error.hpp"
#include "kcusum/evaluation.hpp"
#include "kcusum/running_stats.hpp"

using namespace kcusum;

namespace {

ExperimentConfig small_kcusum(std::vector<double> thresholds, std::uint64_t reps = 200) {
    ExperimentConfig c{Scenario::benchmark(BenchmarkTask::MeanShift),
                       DetectorSpec::kcusum(std::ldexp(1.0, -7)),
                       std::move(thresholds)};
    c.n_reps = reps;
    c.max_steps = 200000;
    c.master_seed = 2024;
    c.oracle_samples = 20000;
    c.threads = 1;
    return c;
}

ExperimentConfig small_cusum(std::vector<double> thresholds, std::uint64_t reps = 200) {
    auto scenario = Scenario::custom("example1", variance_change_pre(), variance_change_post());
    ExperimentConfig c{scenario,
                       DetectorSpec::cusum(LogDensityRatioModel::gaussian(scenario.pre, scenario.post)),
                       std::move(thresholds)};
    c.n_reps = reps;
    c.master_seed = 5;
    c.threads = 1;
    return c;
}

std::string json_of(const EvalReport& r) {
    std::ostringstream os;
    write_json(os, std::span(&r, 1), {}, false);
    return os.str();
}

}  // namespace

TEST(EstimateArl2fa, CusumThresholdZeroIsOne) {
    const auto est = estimate_arl2fa(small_cusum({0.0}));
    ASSERT_EQ(est.size(), 1u);
    EXPECT_EQ(est[0].mean, 1.0);
    EXPECT_EQ(est[0].se, 0.0);
    EXPECT_EQ(est[0].censored, 0u);
    EXPECT_TRUE(est[0].clean);
}

TEST(EstimateArl2fa, KcusumThresholdZeroIsTwiceGeometric) {
    // With h = 0 the first block with v > 0 alarms, so E[T] = 2 / P(g > delta).
    const double delta = std::ldexp(1.0, -7);
    const auto p0 = benchmark_pre_change();
    Rng r(77);
    RunningStats hit;
    for (int i = 0; i < 100000; ++i) {
        const auto x0 = p0.sample(r), x1 = p0.sample(r), y0 = p0.sample(r), y1 = p0.sample(r);
        auto k = [](const Observation& a, const Observation& b) {
            double d2 = 0;
            for (std::size_t j = 0; j < a.dim(); ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
            return std::exp(-d2 / 2);
        };
        hit.push(k(x0, x1) + k(y0, y1) - k(x0, y1) - k(x1, y0) > delta ? 1.0 : 0.0);
    }
    const double want = 2.0 / hit.mean();
    const auto est = estimate_arl2fa(small_kcusum({0.0}, 4000));
    EXPECT_NEAR(est[0].mean, want, 4 * est[0].se + 0.02 * want);
    EXPECT_GT(est[0].mean, 2.0);
    EXPECT_LT(est[0].mean, 8.0);
}

TEST(EstimateArl2fa, StandardErrorDefinition) {
    const auto cfg = small_cusum({2.0}, 50);
    RunningStats s;
    for (std::uint64_t rep = 0; rep < cfg.n_reps; ++rep) {
        const auto t = simulate_replicate(cfg, std::nullopt, rep);
        ASSERT_TRUE(t[0]);
        s.push(static_cast<double>(*t[0]));
    }
    const auto est = estimate_arl2fa(cfg);
    EXPECT_DOUBLE_EQ(est[0].mean, s.mean());
    EXPECT_DOUBLE_EQ(est[0].se, s.stddev() / std::sqrt(50.0));
}

TEST(SharedTrajectory, MatchesSingleThresholdRunsExactly) {
    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
    const auto shared = small_kcusum(grid, 30);
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
        for (std::optional<std::uint64_t> change : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{1}}) {
            const auto all = simulate_replicate(shared, change, rep);
            for (std::size_t t = 0; t < grid.size(); ++t) {
                auto one = small_kcusum({grid[t]}, 30);
                ASSERT_EQ(simulate_replicate(one, change, rep)[0], all[t]);
            }
            for (std::size_t t = 1; t < grid.size(); ++t) ASSERT_GE(*all[t], *all[t - 1]);
        }
    }
}

TEST(SharedTrajectory, AgreesWithIndependentPerThresholdRuns) {
    auto shared = small_kcusum({1.0, 3.0}, 1500);
    auto indep = shared;
    indep.shared_trajectory = false;
    const auto a = estimate_delay(shared);
    const auto b = estimate_delay(indep);
    for (std::size_t t = 0; t < 2; ++t) {
        EXPECT_NEAR(a[t].mean, b[t].mean, 4 * std::hypot(a[t].se, b[t].se));
    }
    const auto fa = estimate_arl2fa(shared);
    const auto fb = estimate_arl2fa(indep);
    for (std::size_t t = 0; t < 2; ++t) {
        EXPECT_NEAR(fa[t].mean, fb[t].mean, 4 * std::hypot(fa[t].se, fb[t].se));
    }
}

TEST(Replicates, IndependentOfRepCountAndThreads) {
    auto a = small_kcusum({1.0, 2.0}, 10);
    auto b = small_kcusum({1.0, 2.0}, 11);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        EXPECT_EQ(simulate_replicate(a, std::nullopt, rep), simulate_replicate(b, std::nullopt, rep));
    }
    a.threads = 1;
    auto c = a;
    c.threads = 3;
    const auto ra = run_experiment(a);
    const auto rc = run_experiment(c);
    EXPECT_EQ(json_of(ra), json_of(rc));
}

TEST(Delay, UndetectableChangeCensorsAndWarns) {
    ExperimentConfig c{Scenario::custom("nochange", benchmark_pre_change(), benchmark_pre_change()),
                       DetectorSpec::kcusum(0.05), {20.0}};
    c.n_reps = 20;
    c.max_steps = 2000;
    c.oracle_samples = 20000;
    c.threads = 1;
    std::vector<std::string> warnings;
    std::optional<MmdEstimate> det;
    const auto est = estimate_delay(c, &warnings, &det);
    ASSERT_TRUE(det);
    EXPECT_LT(det->estimate, 0.05);
    ASSERT_FALSE(warnings.empty());
    EXPECT_GT(est[0].censored, 15u);
    EXPECT_FALSE(est[0].clean);
}

TEST(Delay, AllCensoredIsLowerBoundOnly) {
    auto c = small_kcusum({500.0}, 5);
    c.max_steps = 10;
    const auto report = run_experiment(c);
    EXPECT_TRUE(report.records[0].delay.lower_bound_only);
    EXPECT_EQ(report.records[0].delay.mean_with_censored, 10.0);
    EXPECT_FALSE(report.warnings.empty());
}

TEST(Delay, EasyTaskFasterThanHardTask) {
    auto easy = small_kcusum({4.0}, 300);
    auto hard = easy;
    BenchmarkOptions opts;
    opts.uniform_half_width = kVarianceMatchedHalfWidth;
    hard.scenario = Scenario::benchmark(BenchmarkTask::UniformMatched, opts);
    hard.detector.delta = std::ldexp(1.0, -9);
    const auto a = estimate_delay(easy);
    const auto b = estimate_delay(hard);
    EXPECT_LT(a[0].mean, b[0].mean);
}

TEST(ExperimentConfig, Validation) {
    auto c = small_kcusum({2.0, 1.0});
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_kcusum({});
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_kcusum({1.0});
    c.n_reps = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_kcusum({1.0});
    c.max_steps = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_kcusum({1.0});
    c.detector.delta = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Suite, SmokeRunAndPartialFailure) {
    SuiteConfig sc;
    sc.tasks = {{BenchmarkTask::MeanShift, 0.0, {1.0, 2.0}},
                {BenchmarkTask::VarianceAll, 3.0, {1.0}},
                {BenchmarkTask::UniformMatched, 0.0, {1.0}}};
    sc.n_reps = 1;
    sc.master_seed = 1;
    sc.oracle_samples = 10000;
    sc.threads = 1;
    const auto out = run_task_suite(sc);
    ASSERT_EQ(out.reports.size(), 2u);
    ASSERT_EQ(out.failures.size(), 1u);
    EXPECT_EQ(out.failures[0].substr(0, 2), "2:");
    EXPECT_EQ(out.reports[1].delta, std::ldexp(1.0, -9));

    std::ostringstream csv;
    write_csv(csv, out.reports);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "task,delta,h,arl2fa,arl2fa_se,delay,delay_se,censored");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
    }
    EXPECT_EQ(rows, 3);

    std::ostringstream js;
    write_json(js, out.reports, out.failures, true);
    EXPECT_NE(js.str().find("wall_time_s"), std::string::npos);
    std::ostringstream js_plain;
    write_json(js_plain, out.reports, out.failures, false);
    EXPECT_EQ(js_plain.str().find("wall_time_s"), std::string::npos);
}

TEST(FitLine, ExactAndNoisy) {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    const auto g = fit_line(x, std::vector<double>{1, 3, 2, 4});
    EXPECT_LT(g.r2, 1.0);
    EXPECT_THROW((void)fit_line(std::vector<double>{1}, std::vector<double>{1}), InputError);
}

TEST(FormatDouble, RoundTrips) {
    Rng r(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = r.normal() * std::pow(10.0, r.uniform(-30, 30));
        ASSERT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(INFINITY), "inf");
}
