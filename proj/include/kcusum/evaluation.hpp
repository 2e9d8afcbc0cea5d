#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcusum/detectors.hpp"
#include "kcusum/distributions.hpp"
#include "kcusum/kernels.hpp"
#include "kcusum/mmd.hpp"

namespace kcusum {

enum class DetectorKind { Cusum, Kcusum };

[[nodiscard]] std::string_view to_string(DetectorKind kind);

/// Detector recipe; a fresh instance is built for every replicate.
struct DetectorSpec {
    DetectorKind kind = DetectorKind::Kcusum;
    KernelSpec kernel = KernelSpec::gaussian();
    double delta = 0.0;                       ///< KCUSUM only
    std::optional<LogDensityRatioModel> llr;  ///< CUSUM only

    static DetectorSpec kcusum(double delta, KernelSpec kernel = KernelSpec::gaussian());
    static DetectorSpec cusum(LogDensityRatioModel llr);

    void validate() const;
};

/// Pre/post-change laws plus a label. task_id is 1..4 for the benchmark
/// scenarios and 0 for custom ones; it is also an RNG stream coordinate.
struct Scenario {
    std::string name;
    std::uint64_t task_id = 0;
    Distribution pre;
    Distribution post;

    static Scenario benchmark(BenchmarkTask task, const BenchmarkOptions& options = {});
    static Scenario custom(std::string name, Distribution pre, Distribution post, std::uint64_t stream_id = 0);
};

struct ExperimentConfig {
    Scenario scenario;
    DetectorSpec detector;
    std::vector<double> thresholds;  ///< nonempty, ascending
    std::uint64_t n_reps = 5000;
    std::uint64_t max_steps = 1'000'000;  ///< censoring horizon
    std::uint64_t master_seed = 0;
    /// Derive every threshold's run length from one trajectory per replicate.
    bool shared_trajectory = true;
    /// Samples for the d_k^2 > delta detectability check (0 disables it).
    std::uint64_t oracle_samples = kDefaultOracleSamples;
    /// Worker threads (0 = hardware concurrency). Never affects results.
    unsigned threads = 0;

    void validate() const;
};

/// Run-length summary for one threshold.
///
/// `mean`/`se` use only uncensored replicates (se = sample sd / sqrt(uncensored)).
/// `mean_with_censored` counts censored replicates at max_steps, a lower-biased
/// figure reported separately.
struct RunLengthEstimate {
    double mean = 0.0;
    double se = 0.0;
    double mean_with_censored = 0.0;
    std::uint64_t uncensored = 0;
    std::uint64_t censored = 0;
    /// Every replicate censored: only mean_with_censored (a lower bound) is meaningful.
    bool lower_bound_only = false;
    /// Censored fraction below 1%.
    bool clean = false;
};

struct ThresholdRecord {
    double h = 0.0;
    RunLengthEstimate arl2fa;
    RunLengthEstimate delay;
};

struct EvalReport {
    std::string task;
    std::uint64_t task_id = 0;
    DetectorKind detector = DetectorKind::Kcusum;
    double delta = 0.0;
    std::string pre_description;
    std::string post_description;
    std::string kernel_description;
    std::uint64_t n_reps = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t master_seed = 0;
    bool shared_trajectory = true;
    std::optional<MmdEstimate> detectability;
    std::vector<ThresholdRecord> records;
    std::vector<std::string> warnings;
    double wall_time_s = 0.0;
    std::string version;
};

/// Per-replicate alarm times, one slot per threshold; nullopt = censored.
using ReplicateTimes = std::vector<std::optional<std::uint64_t>>;

/// Alarm times of replicate `rep` on a stream that changes at `change_at`
/// (nullopt: never). Deterministic in (master_seed, task_id, purpose, rep).
[[nodiscard]] ReplicateTimes simulate_replicate(const ExperimentConfig& config,
                                                std::optional<std::uint64_t> change_at, std::uint64_t rep);

/// ARL2FA per threshold: detectors run on endless pre-change streams.
[[nodiscard]] std::vector<RunLengthEstimate> estimate_arl2fa(const ExperimentConfig& config);

/// Detection delay per threshold: alarm time on streams whose change is at t = 1.
/// For KCUSUM, `warnings` (if given) receives a note when d_k^2 <= delta.
[[nodiscard]] std::vector<RunLengthEstimate> estimate_delay(const ExperimentConfig& config,
                                                            std::vector<std::string>* warnings = nullptr,
                                                            std::optional<MmdEstimate>* detectability = nullptr);

/// Both estimates plus a config echo.
[[nodiscard]] EvalReport run_experiment(const ExperimentConfig& config);

struct SuiteTask {
    BenchmarkTask task = BenchmarkTask::MeanShift;
    double delta = 0.0;  ///< 0 selects the task's default
    std::vector<double> thresholds;
};

struct SuiteConfig {
    std::vector<SuiteTask> tasks;
    std::uint64_t n_reps = 5000;
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t master_seed = 0;
    KernelSpec kernel = KernelSpec::gaussian();
    BenchmarkOptions benchmark;
    bool shared_trajectory = true;
    std::uint64_t oracle_samples = kDefaultOracleSamples;
    unsigned threads = 0;
};

struct SuiteReport {
    std::vector<EvalReport> reports;
    /// "task: message" for each task that failed; the remaining tasks still run.
    std::vector<std::string> failures;
};

/// KCUSUM sweep over benchmark tasks and threshold grids.
[[nodiscard]] SuiteReport run_task_suite(const SuiteConfig& config);

/// Plot-ready CSV: task,delta,h,arl2fa,arl2fa_se,delay,delay_se,censored.
void write_csv(std::ostream& os, std::span<const EvalReport> reports);
/// Full JSON document; wall time is omitted unless `include_timing`.
void write_json(std::ostream& os, std::span<const EvalReport> reports, std::span<const std::string> failures,
                bool include_timing);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept (needs >= 2 points).
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Decimal with 17 significant digits, which round-trips every double.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string_view library_version();

}  // namespace kcusum
