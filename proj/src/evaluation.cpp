#include "kcusum/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "kcusum/error.hpp"
#include "kcusum/parallel.hpp"
#include "kcusum/running_stats.hpp"

#ifndef KCUSUM_VERSION
#define KCUSUM_VERSION "0.0.0"
#endif

namespace kcusum {

namespace {

// RNG stream coordinates: (master_seed, task_id, purpose, threshold slot, replicate, substream).
constexpr std::uint64_t kPurposeArl = 1;
constexpr std::uint64_t kPurposeDelay = 2;
constexpr std::uint64_t kPurposeOracle = 3;
constexpr std::uint64_t kSharedSlot = 0xffffffffu;
constexpr std::uint64_t kObservationStream = 0;
constexpr std::uint64_t kReferenceStream = 1;

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec, const Distribution& reference_law, double h,
                                        Rng reference_rng) {
    if (spec.kind == DetectorKind::Cusum) {
        return std::make_unique<CusumDetector>(*spec.llr, h);
    }
    KcusumConfig cfg{spec.kernel, spec.delta, h};
    return std::make_unique<KcusumDetector>(cfg, ReferenceSource::sampler(reference_law, std::move(reference_rng)));
}

ReplicateTimes simulate(const ExperimentConfig& config, std::optional<std::uint64_t> change_at,
                        std::uint64_t purpose, std::uint64_t slot, std::uint64_t rep,
                        std::span<const double> thresholds) {
    const std::uint64_t seed = config.master_seed;
    const std::uint64_t task = config.scenario.task_id;
    Rng obs_rng(seed, {task, purpose, slot, rep, kObservationStream});
    Rng ref_rng(seed, {task, purpose, slot, rep, kReferenceStream});

    const double h_run = thresholds.size() == 1 ? thresholds.front() : std::numeric_limits<double>::infinity();
    auto detector = make_detector(config.detector, config.scenario.pre, h_run, std::move(ref_rng));
    SampledStream stream(config.scenario.pre, config.scenario.post, change_at, std::move(obs_rng));

    ReplicateTimes times(thresholds.size());
    std::size_t next = 0;
    for (std::uint64_t step = 1; step <= config.max_steps && next < thresholds.size(); ++step) {
        const auto alarm = detector->observe(*stream.next());
        const double z = detector->state().z;
        while (next < thresholds.size() && detector->crosses(z, thresholds[next])) {
            times[next++] = step;
        }
        if (alarm) break;
    }
    return times;
}

std::vector<ReplicateTimes> run_replicates(const ExperimentConfig& config, std::optional<std::uint64_t> change_at,
                                           std::uint64_t purpose) {
    const std::size_t k = config.thresholds.size();
    std::vector<ReplicateTimes> per_rep(config.n_reps);
    if (config.shared_trajectory) {
        parallel_for(config.n_reps, config.threads, [&](std::size_t rep) {
            per_rep[rep] = simulate(config, change_at, purpose, kSharedSlot, rep, config.thresholds);
        });
        return per_rep;
    }
    for (auto& r : per_rep) r.resize(k);
    parallel_for(config.n_reps * k, config.threads, [&](std::size_t job) {
        const std::size_t rep = job / k;
        const std::size_t t = job % k;
        const auto one = simulate(config, change_at, purpose, t, rep, std::span(&config.thresholds[t], 1));
        per_rep[rep][t] = one.front();
    });
    return per_rep;
}

std::vector<RunLengthEstimate> summarize(const ExperimentConfig& config, const std::vector<ReplicateTimes>& per_rep) {
    std::vector<RunLengthEstimate> out(config.thresholds.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        RunningStats uncensored;
        RunningStats with_censored;
        std::uint64_t censored = 0;
        for (const auto& rep : per_rep) {
            if (rep[t]) {
                const double v = static_cast<double>(*rep[t]);
                uncensored.push(v);
                with_censored.push(v);
            } else {
                ++censored;
                with_censored.push(static_cast<double>(config.max_steps));
            }
        }
        RunLengthEstimate& e = out[t];
        e.uncensored = uncensored.count();
        e.censored = censored;
        e.mean = uncensored.mean();
        e.se = uncensored.std_error();
        e.mean_with_censored = with_censored.mean();
        e.lower_bound_only = e.uncensored == 0;
        e.clean = static_cast<double>(censored) < 0.01 * static_cast<double>(config.n_reps);
    }
    return out;
}

nlohmann::json estimate_json(const RunLengthEstimate& e) {
    return {{"mean", e.lower_bound_only ? nlohmann::json(nullptr) : nlohmann::json(e.mean)},
            {"se", e.lower_bound_only ? nlohmann::json(nullptr) : nlohmann::json(e.se)},
            {"mean_with_censored", e.mean_with_censored},
            {"uncensored", e.uncensored},
            {"censored", e.censored},
            {"lower_bound_only", e.lower_bound_only},
            {"clean", e.clean}};
}

}  // namespace

std::string_view to_string(DetectorKind kind) {
    return kind == DetectorKind::Cusum ? "cusum" : "kcusum";
}

DetectorSpec DetectorSpec::kcusum(double delta, KernelSpec kernel) {
    DetectorSpec s;
    s.kind = DetectorKind::Kcusum;
    s.kernel = kernel;
    s.delta = delta;
    return s;
}

DetectorSpec DetectorSpec::cusum(LogDensityRatioModel llr) {
    DetectorSpec s;
    s.kind = DetectorKind::Cusum;
    s.llr = std::move(llr);
    return s;
}

void DetectorSpec::validate() const {
    if (kind == DetectorKind::Cusum) {
        if (!llr) throw ConfigError("CUSUM needs a log-density ratio model");
        return;
    }
    KcusumConfig{kernel, delta, 0.0}.validate();
}

Scenario Scenario::benchmark(BenchmarkTask task, const BenchmarkOptions& options) {
    return Scenario{std::to_string(static_cast<int>(task)), static_cast<std::uint64_t>(task), benchmark_pre_change(),
                    benchmark_post_change(task, options)};
}

Scenario Scenario::custom(std::string name, Distribution pre, Distribution post, std::uint64_t stream_id) {
    return Scenario{std::move(name), stream_id, std::move(pre), std::move(post)};
}

void ExperimentConfig::validate() const {
    detector.validate();
    if (scenario.pre.dim() != scenario.post.dim()) {
        throw ConfigError("pre- and post-change laws have different dimensions");
    }
    if (detector.kind == DetectorKind::Cusum && detector.llr->dim() != scenario.pre.dim()) {
        throw ConfigError("llr model dimension does not match the scenario");
    }
    if (n_reps < 1) throw ConfigError("n_reps must be >= 1");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (thresholds.empty()) throw ConfigError("threshold list is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (std::isnan(thresholds[i]) || thresholds[i] < 0.0 || !std::isfinite(thresholds[i])) {
            throw ConfigError("thresholds must be finite and >= 0");
        }
        if (i > 0 && thresholds[i] < thresholds[i - 1]) {
            throw ConfigError("thresholds must be sorted ascending");
        }
    }
}

ReplicateTimes simulate_replicate(const ExperimentConfig& config, std::optional<std::uint64_t> change_at,
                                  std::uint64_t rep) {
    config.validate();
    const std::uint64_t purpose = change_at ? kPurposeDelay : kPurposeArl;
    if (config.shared_trajectory) {
        return simulate(config, change_at, purpose, kSharedSlot, rep, config.thresholds);
    }
    ReplicateTimes out;
    for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
        out.push_back(simulate(config, change_at, purpose, t, rep, std::span(&config.thresholds[t], 1)).front());
    }
    return out;
}

std::vector<RunLengthEstimate> estimate_arl2fa(const ExperimentConfig& config) {
    config.validate();
    return summarize(config, run_replicates(config, std::nullopt, kPurposeArl));
}

std::vector<RunLengthEstimate> estimate_delay(const ExperimentConfig& config, std::vector<std::string>* warnings,
                                              std::optional<MmdEstimate>* detectability) {
    config.validate();
    if (config.detector.kind == DetectorKind::Kcusum && config.oracle_samples > 0) {
        const MmdEstimate est =
            mmd2_oracle(config.detector.kernel, config.scenario.pre, config.scenario.post, config.oracle_samples,
                        Rng(config.master_seed, {config.scenario.task_id, kPurposeOracle}).engine()(), config.threads);
        if (detectability) *detectability = est;
        if (!(est.estimate > config.detector.delta) && warnings) {
            std::ostringstream os;
            os << "d_k^2 estimate " << format_double(est.estimate) << " (se " << format_double(est.std_error)
               << ") does not exceed delta " << format_double(config.detector.delta)
               << "; the change may be undetectable and delays will censor";
            warnings->push_back(os.str());
        }
    }
    return summarize(config, run_replicates(config, std::uint64_t{1}, kPurposeDelay));
}

EvalReport run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();

    EvalReport report;
    report.task = config.scenario.name;
    report.task_id = config.scenario.task_id;
    report.detector = config.detector.kind;
    report.delta = config.detector.kind == DetectorKind::Kcusum ? config.detector.delta : 0.0;
    report.pre_description = config.scenario.pre.describe();
    report.post_description = config.scenario.post.describe();
    if (config.detector.kind == DetectorKind::Kcusum) {
        report.kernel_description =
            std::string(to_string(config.detector.kernel.family)) + " sigma2=" + format_double(config.detector.kernel.sigma2);
    }
    report.n_reps = config.n_reps;
    report.max_steps = config.max_steps;
    report.master_seed = config.master_seed;
    report.shared_trajectory = config.shared_trajectory;

    const auto arl = estimate_arl2fa(config);
    const auto delay = estimate_delay(config, &report.warnings, &report.detectability);
    for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
        report.records.push_back({config.thresholds[t], arl[t], delay[t]});
        if (arl[t].lower_bound_only) {
            report.warnings.push_back("h=" + format_double(config.thresholds[t]) +
                                      ": every ARL2FA replicate censored; estimate is a lower bound only");
        }
        if (delay[t].lower_bound_only) {
            report.warnings.push_back("h=" + format_double(config.thresholds[t]) +
                                      ": every delay replicate censored; estimate is a lower bound only");
        }
    }
    report.version = std::string(library_version());
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

SuiteReport run_task_suite(const SuiteConfig& config) {
    SuiteReport out;
    for (const SuiteTask& t : config.tasks) {
        try {
            ExperimentConfig ec{Scenario::benchmark(t.task, config.benchmark),
                                DetectorSpec::kcusum(t.delta > 0.0 ? t.delta : benchmark_default_delta(t.task),
                                                     config.kernel),
                                t.thresholds,
                                config.n_reps,
                                config.max_steps,
                                config.master_seed,
                                config.shared_trajectory,
                                config.oracle_samples,
                                config.threads};
            out.reports.push_back(run_experiment(ec));
        } catch (const std::exception& e) {
            out.failures.push_back(std::to_string(static_cast<int>(t.task)) + ": " + e.what());
        }
    }
    return out;
}

void write_csv(std::ostream& os, std::span<const EvalReport> reports) {
    os << "task,delta,h,arl2fa,arl2fa_se,delay,delay_se,censored\n";
    auto est = [](const RunLengthEstimate& e, double v) {
        return e.lower_bound_only ? std::string("nan") : format_double(v);
    };
    for (const EvalReport& r : reports) {
        const std::string delta = r.detector == DetectorKind::Kcusum ? format_double(r.delta) : std::string();
        for (const ThresholdRecord& rec : r.records) {
            os << r.task << ',' << delta << ',' << format_double(rec.h) << ',' << est(rec.arl2fa, rec.arl2fa.mean)
               << ',' << est(rec.arl2fa, rec.arl2fa.se) << ',' << est(rec.delay, rec.delay.mean) << ','
               << est(rec.delay, rec.delay.se) << ',' << (rec.arl2fa.censored + rec.delay.censored) << '\n';
        }
    }
}

void write_json(std::ostream& os, std::span<const EvalReport> reports, std::span<const std::string> failures,
                bool include_timing) {
    nlohmann::json doc;
    doc["version"] = std::string(library_version());
    doc["reports"] = nlohmann::json::array();
    for (const EvalReport& r : reports) {
        nlohmann::json j;
        j["task"] = r.task;
        j["task_id"] = r.task_id;
        j["detector"] = std::string(to_string(r.detector));
        if (r.detector == DetectorKind::Kcusum) {
            j["delta"] = r.delta;
            j["kernel"] = r.kernel_description;
        }
        j["pre"] = r.pre_description;
        j["post"] = r.post_description;
        j["n_reps"] = r.n_reps;
        j["max_steps"] = r.max_steps;
        j["master_seed"] = r.master_seed;
        j["shared_trajectory"] = r.shared_trajectory;
        if (r.detectability) {
            j["mmd2_oracle"] = {{"estimate", r.detectability->estimate},
                                {"std_error", r.detectability->std_error},
                                {"n_samples", r.detectability->n_samples}};
        }
        j["records"] = nlohmann::json::array();
        for (const ThresholdRecord& rec : r.records) {
            j["records"].push_back({{"h", rec.h}, {"arl2fa", estimate_json(rec.arl2fa)}, {"delay", estimate_json(rec.delay)}});
        }
        j["warnings"] = r.warnings;
        if (include_timing) j["wall_time_s"] = r.wall_time_s;
        doc["reports"].push_back(std::move(j));
    }
    doc["failures"] = std::vector<std::string>(failures.begin(), failures.end());
    os << doc.dump(2) << '\n';
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InputError("fit_line needs two equally sized series with >= 2 points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InputError("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string_view library_version() {
    return KCUSUM_VERSION;
}

}  // namespace kcusum
