#include "kcusum/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "kcusum/bounds.hpp"
#include "kcusum/cli/config_file.hpp"
#include "kcusum/cli/stream_io.hpp"
#include "kcusum/detectors.hpp"
#include "kcusum/error.hpp"
#include "kcusum/evaluation.hpp"

namespace kcusum::cli {

namespace {

struct SeedFlags {
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    bool nondeterministic = false;
};

void add_seed_flags(CLI::App* sub, SeedFlags& f) {
    f.seed_opt = sub->add_option("--seed", f.seed, "Master seed (fallback: KCUSUM_SEED)");
    sub->add_flag("--nondeterministic", f.nondeterministic, "Allow an entropy seed when no seed is given");
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + " is not a nonnegative integer: '" + std::string(text) + "'");
    }
    return v;
}

/// --seed, then an explicit config value, then KCUSUM_SEED, then --nondeterministic.
std::uint64_t resolve_seed(const SeedFlags& f, std::optional<std::uint64_t> from_config, std::ostream& err) {
    if (f.seed_opt && f.seed_opt->count() > 0) return f.seed;
    if (from_config) return *from_config;
    if (const char* env = std::getenv("KCUSUM_SEED"); env && *env) return parse_u64(env, "KCUSUM_SEED");
    if (f.nondeterministic) {
        const std::uint64_t s = entropy_seed();
        err << "note: using nondeterministic seed " << s << '\n';
        return s;
    }
    throw UsageError("this command draws random numbers: pass --seed N, set KCUSUM_SEED, or pass --nondeterministic");
}

void reject_unused(const KeyValueConfig& cfg) {
    const auto unused = cfg.unused_keys();
    if (!unused.empty()) throw ConfigError(cfg.source() + ": unknown key '" + unused.front() + "'");
}

std::uint64_t nonneg_int(const KeyValueConfig& cfg, std::string_view key, std::uint64_t fallback) {
    const auto v = cfg.get_int(key);
    if (!v) return fallback;
    if (*v < 0) throw ConfigError(cfg.source() + ": '" + std::string(key) + "' must be >= 0");
    return static_cast<std::uint64_t>(*v);
}

KernelSpec make_kernel(const std::string& family, double sigma2) {
    switch (parse_kernel_family(family)) {
        case KernelFamily::Gaussian:
            return KernelSpec::gaussian(sigma2);
    }
    throw ConfigError("unsupported kernel '" + family + "'");
}

DatabasePolicy parse_policy(const std::string& name) {
    if (name == "fail") return DatabasePolicy::FailOnExhaustion;
    if (name == "cyclic") return DatabasePolicy::Cyclic;
    if (name == "resample") return DatabasePolicy::Resample;
    throw ConfigError("unknown reference policy '" + name + "' (expected fail, cyclic or resample)");
}

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path == "-") {
            os_ = &fallback;
            return;
        }
        file_.open(path);
        if (!file_) throw InputError("cannot write '" + path + "'");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
    std::string detector = "kcusum";
    std::string input = "-";
    std::string format;
    bool header = false;
    double threshold = 0.0;
    double delta = 0.0;
    std::string kernel = "gaussian";
    double sigma2 = 1.0;
    std::string reference;
    std::string reference_format;
    bool reference_header = false;
    std::string reference_policy = "fail";
    std::string reference_dist;
    std::string llr_model;
    std::string trace;
    std::uint64_t max_steps = 0;
    SeedFlags seed;
};

CLI::App* add_detect(CLI::App& app, DetectArgs& a) {
    auto* sub = app.add_subcommand("detect", "Run CUSUM or KCUSUM over a data stream");
    sub->add_option("--detector", a.detector, "cusum or kcusum")->check(CLI::IsMember({"cusum", "kcusum"}));
    sub->add_option("--input", a.input, "Stream file, or - for stdin");
    sub->add_option("--format", a.format, "csv or ndjson (default: from the file extension)");
    sub->add_flag("--header", a.header, "Skip the first line of a CSV input");
    sub->add_option("--threshold", a.threshold, "Alarm threshold h >= 0")->required();
    sub->add_option("--delta", a.delta, "KCUSUM drift parameter");
    sub->add_option("--kernel", a.kernel, "Kernel family");
    sub->add_option("--sigma2", a.sigma2, "Gaussian kernel bandwidth");
    sub->add_option("--reference", a.reference, "Pre-change reference database file");
    sub->add_option("--reference-format", a.reference_format, "csv or ndjson");
    sub->add_flag("--reference-header", a.reference_header, "Skip the first line of a CSV reference file");
    sub->add_option("--reference-policy", a.reference_policy, "fail, cyclic or resample");
    sub->add_option("--reference-dist", a.reference_dist, "Config file describing the pre-change law to sample");
    sub->add_option("--llr-model", a.llr_model, "Config file with pre.* and post.* Gaussian laws");
    sub->add_option("--trace", a.trace, "Write n,v,z per step to this CSV file");
    sub->add_option("--max-steps", a.max_steps, "Stop after this many observations (0: no limit)");
    add_seed_flags(sub, a.seed);
    return sub;
}

int cmd_detect(const DetectArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
    std::unique_ptr<Detector> detector;
    if (a.detector == "cusum") {
        if (a.llr_model.empty()) throw UsageError("--detector cusum requires --llr-model CFG");
        if (!a.reference.empty() || !a.reference_dist.empty()) {
            throw UsageError("--reference/--reference-dist apply to --detector kcusum only");
        }
        const auto cfg = KeyValueConfig::load(a.llr_model);
        auto llr = llr_from_config(cfg);
        reject_unused(cfg);
        detector = std::make_unique<CusumDetector>(std::move(llr), a.threshold);
    } else {
        KcusumConfig config{make_kernel(a.kernel, a.sigma2), a.delta, a.threshold};
        config.validate();
        if (a.reference.empty() == a.reference_dist.empty()) {
            throw UsageError("--detector kcusum needs exactly one of --reference PATH or --reference-dist CFG");
        }
        std::optional<ReferenceSource> reference;
        if (!a.reference.empty()) {
            const StreamFormat fmt =
                a.reference_format.empty() ? format_for_path(a.reference) : parse_stream_format(a.reference_format);
            auto records = std::make_shared<const std::vector<Observation>>(
                read_stream_file(a.reference, fmt, a.reference_header));
            if (records->empty()) throw InputError("reference file '" + a.reference + "' has no records");
            const DatabasePolicy policy = parse_policy(a.reference_policy);
            Rng rng(policy == DatabasePolicy::Resample ? resolve_seed(a.seed, std::nullopt, err) : 0);
            reference = ReferenceSource::database(std::move(records), policy, std::move(rng));
        } else {
            const auto cfg = KeyValueConfig::load(a.reference_dist);
            Distribution law = distribution_from_config(cfg);
            reject_unused(cfg);
            reference = ReferenceSource::sampler(std::move(law), Rng(resolve_seed(a.seed, std::nullopt, err)));
        }
        detector = std::make_unique<KcusumDetector>(std::move(config), std::move(*reference));
    }

    std::ifstream file;
    std::istream* src = &in;
    if (a.input != "-") {
        file.open(a.input);
        if (!file) throw InputError("cannot open input '" + a.input + "'");
        src = &file;
    }
    const StreamFormat fmt = a.format.empty() ? format_for_path(a.input) : parse_stream_format(a.format);
    StreamReader reader(*src, fmt, a.header);

    std::ofstream trace;
    if (!a.trace.empty()) {
        trace.open(a.trace);
        if (!trace) throw InputError("cannot write trace '" + a.trace + "'");
        trace << "n,v,z\n";
    }

    std::optional<AlarmEvent> alarm;
    while (auto x = reader.next()) {
        try {
            alarm = detector->observe(*x);
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(reader.line_number()) + ": " + e.what());
        }
        const DetectorState& s = detector->state();
        if (trace.is_open()) {
            trace << s.n << ',' << format_double(detector->last_increment()) << ',' << format_double(s.z) << '\n';
        }
        if (alarm || (a.max_steps > 0 && s.n >= a.max_steps)) break;
    }

    nlohmann::json doc;
    doc["alarm"] = alarm.has_value();
    doc["time"] = alarm ? nlohmann::json(alarm->time) : nlohmann::json(nullptr);
    doc["statistic"] = detector->state().z;
    out << doc.dump() << '\n';
    return alarm ? kExitAlarm : kExitNoAlarm;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::string config;
    std::vector<int> tasks;
    std::string detector = "kcusum";
    std::uint64_t reps = 5000;
    std::string thresholds;
    std::string out;
    double delta = 0.0;
    std::uint64_t max_steps = 1'000'000;
    double uniform_half_width = BenchmarkOptions{}.uniform_half_width;
    bool fixed_component = false;
    unsigned threads = 0;
    bool per_threshold = false;
    std::uint64_t oracle_samples = kDefaultOracleSamples;
    std::string kernel = "gaussian";
    double sigma2 = 1.0;
    bool timing = false;
    SeedFlags seed;

    CLI::Option* detector_opt = nullptr;
    CLI::Option* reps_opt = nullptr;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* max_steps_opt = nullptr;
    CLI::Option* uhw_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* oracle_opt = nullptr;
    CLI::Option* kernel_opt = nullptr;
    CLI::Option* sigma2_opt = nullptr;
};

/// Default grids, used when neither flags nor config give thresholds.
const std::vector<double> kDefaultKcusumGrid{2, 4, 8, 16, 32, 64};
const std::vector<double> kDefaultCusumGrid{1, 2, 3, 4, 5, 6};

CLI::App* add_evaluate(CLI::App& app, EvaluateArgs& a) {
    auto* sub = app.add_subcommand("evaluate", "Estimate ARL2FA and detection delay by simulation");
    sub->add_option("--config", a.config, "Key-value experiment file; flags override its entries");
    sub->add_option("--task", a.tasks, "Benchmark task ids (1..4), comma separated")->delimiter(',');
    a.detector_opt =
        sub->add_option("--detector", a.detector, "kcusum or cusum")->check(CLI::IsMember({"cusum", "kcusum"}));
    a.reps_opt = sub->add_option("--reps", a.reps, "Replicates per estimate (default 5000)");
    sub->add_option("--thresholds", a.thresholds, "Threshold grid: list, a:b:log[:N] or a:b:lin[:step]");
    sub->add_option("--out", a.out, "Output directory for report.json and report.csv");
    a.delta_opt = sub->add_option("--delta", a.delta, "KCUSUM delta for every task (default: per-task)");
    a.max_steps_opt = sub->add_option("--max-steps", a.max_steps, "Censoring horizon (default 1e6)");
    a.uhw_opt = sub->add_option("--uniform-half-width", a.uniform_half_width, "Task 4 uniform half width");
    sub->add_flag("--fixed-component", a.fixed_component, "Task 3 always scales coordinate 0");
    a.threads_opt = sub->add_option("--threads", a.threads, "Worker threads (0: all cores)");
    sub->add_flag("--per-threshold", a.per_threshold, "Independent runs per threshold instead of one shared trajectory");
    a.oracle_opt = sub->add_option("--oracle-samples", a.oracle_samples, "MMD oracle samples (0 disables the check)");
    a.kernel_opt = sub->add_option("--kernel", a.kernel, "Kernel family");
    a.sigma2_opt = sub->add_option("--sigma2", a.sigma2, "Gaussian kernel bandwidth");
    sub->add_flag("--timing", a.timing, "Include wall time in report.json");
    add_seed_flags(sub, a.seed);
    return sub;
}

struct EvalPlan {
    std::vector<int> tasks;
    std::string detector = "kcusum";
    std::uint64_t reps = 5000;
    std::optional<std::vector<double>> thresholds;
    std::string out;
    std::optional<double> delta;
    std::uint64_t max_steps = 1'000'000;
    BenchmarkOptions benchmark;
    unsigned threads = 0;
    bool shared = true;
    std::uint64_t oracle_samples = kDefaultOracleSamples;
    KernelSpec kernel = KernelSpec::gaussian();
    std::optional<std::uint64_t> seed;
    std::optional<Scenario> custom;
};

int to_task_id(double v) {
    if (v != std::floor(v) || v < 1 || v > 4) throw ConfigError("task ids must be integers in 1..4");
    return static_cast<int>(v);
}

/// Config keys: task (list), detector, reps, seed, thresholds, out, delta, max_steps,
/// uniform_half_width, fixed_component, threads, shared_trajectory, oracle_samples,
/// kernel, sigma2, and for a custom scenario `scenario = custom`, name, pre.*, post.*.
EvalPlan plan_from_config(const KeyValueConfig& cfg) {
    EvalPlan p;
    if (auto t = cfg.get_doubles("task")) {
        for (double v : *t) p.tasks.push_back(to_task_id(v));
    }
    p.detector = cfg.get("detector").value_or(p.detector);
    p.reps = nonneg_int(cfg, "reps", p.reps);
    if (cfg.has("seed")) p.seed = nonneg_int(cfg, "seed", 0);
    if (auto t = cfg.get("thresholds")) p.thresholds = parse_grid_spec(*t);
    p.out = cfg.get("out").value_or("");
    p.delta = cfg.get_double("delta");
    p.max_steps = nonneg_int(cfg, "max_steps", p.max_steps);
    p.benchmark.uniform_half_width = cfg.get_double("uniform_half_width").value_or(p.benchmark.uniform_half_width);
    p.benchmark.redraw_component = !cfg.get_bool("fixed_component").value_or(false);
    p.threads = static_cast<unsigned>(nonneg_int(cfg, "threads", 0));
    p.shared = cfg.get_bool("shared_trajectory").value_or(true);
    p.oracle_samples = nonneg_int(cfg, "oracle_samples", p.oracle_samples);
    p.kernel = kernel_from_config(cfg);
    const std::string scenario = cfg.get("scenario").value_or("benchmark");
    if (scenario == "custom") {
        p.custom = Scenario::custom(cfg.get("name").value_or("custom"), distribution_from_config(cfg, "pre."),
                                    distribution_from_config(cfg, "post."));
    } else if (scenario != "benchmark") {
        throw ConfigError(cfg.source() + ": scenario must be 'benchmark' or 'custom'");
    }
    reject_unused(cfg);
    return p;
}

void apply_flags(EvalPlan& p, const EvaluateArgs& a) {
    if (!a.tasks.empty()) {
        p.tasks.clear();
        for (int t : a.tasks) p.tasks.push_back(to_task_id(t));
    }
    if (a.detector_opt->count()) p.detector = a.detector;
    if (a.reps_opt->count()) p.reps = a.reps;
    if (a.seed.seed_opt->count()) p.seed = a.seed.seed;
    if (!a.thresholds.empty()) p.thresholds = parse_grid_spec(a.thresholds);
    if (!a.out.empty()) p.out = a.out;
    if (a.delta_opt->count()) p.delta = a.delta;
    if (a.max_steps_opt->count()) p.max_steps = a.max_steps;
    if (a.uhw_opt->count()) p.benchmark.uniform_half_width = a.uniform_half_width;
    if (a.fixed_component) p.benchmark.redraw_component = false;
    if (a.threads_opt->count()) p.threads = a.threads;
    if (a.per_threshold) p.shared = false;
    if (a.oracle_opt->count()) p.oracle_samples = a.oracle_samples;
    if (a.kernel_opt->count() || a.sigma2_opt->count()) {
        p.kernel = make_kernel(a.kernel, a.sigma2_opt->count() ? a.sigma2 : p.kernel.sigma2);
    }
}

int cmd_evaluate(const EvaluateArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
    EvalPlan plan;
    if (!a.config.empty()) plan = plan_from_config(KeyValueConfig::load(a.config));
    apply_flags(plan, a);
    if (plan.out.empty()) {
        err << "error: an output directory is required (--out DIR)\n" << sub.help();
        return kExitError;
    }
    if (plan.tasks.empty() == !plan.custom.has_value()) {
        err << "error: give --task ids or a custom scenario in --config (not both)\n" << sub.help();
        return kExitError;
    }
    if (plan.detector != "kcusum" && plan.detector != "cusum") {
        throw ConfigError("detector must be 'kcusum' or 'cusum'");
    }
    const bool kcusum = plan.detector == "kcusum";
    const std::uint64_t seed = resolve_seed(SeedFlags{}, plan.seed, err);
    const std::vector<double> grid = plan.thresholds.value_or(kcusum ? kDefaultKcusumGrid : kDefaultCusumGrid);

    auto make_config = [&](Scenario scenario) {
        DetectorSpec det = kcusum ? DetectorSpec::kcusum(0.0, plan.kernel)
                                  : DetectorSpec::cusum(LogDensityRatioModel::gaussian(scenario.pre, scenario.post));
        return ExperimentConfig{std::move(scenario), std::move(det), grid, plan.reps, plan.max_steps, seed,
                                plan.shared, plan.oracle_samples, plan.threads};
    };

    SuiteReport suite;
    if (plan.custom) {
        ExperimentConfig ec = make_config(*plan.custom);
        if (kcusum) {
            if (!plan.delta) throw ConfigError("a custom scenario needs an explicit delta for kcusum");
            ec.detector.delta = *plan.delta;
        }
        suite.reports.push_back(run_experiment(ec));
    } else if (kcusum) {
        SuiteConfig sc;
        for (int t : plan.tasks) sc.tasks.push_back(SuiteTask{benchmark_task_from_int(t), plan.delta.value_or(0.0), grid});
        sc.n_reps = plan.reps;
        sc.max_steps = plan.max_steps;
        sc.master_seed = seed;
        sc.kernel = plan.kernel;
        sc.benchmark = plan.benchmark;
        sc.shared_trajectory = plan.shared;
        sc.oracle_samples = plan.oracle_samples;
        sc.threads = plan.threads;
        suite = run_task_suite(sc);
    } else {
        for (int t : plan.tasks) {
            try {
                suite.reports.push_back(
                    run_experiment(make_config(Scenario::benchmark(benchmark_task_from_int(t), plan.benchmark))));
            } catch (const std::exception& e) {
                suite.failures.push_back(std::to_string(t) + ": " + e.what());
            }
        }
    }

    const std::filesystem::path dir(plan.out);
    std::filesystem::create_directories(dir);
    {
        std::ofstream js(dir / "report.json");
        std::ofstream csv(dir / "report.csv");
        if (!js || !csv) throw InputError("cannot write reports under '" + plan.out + "'");
        write_json(js, suite.reports, suite.failures, a.timing);
        write_csv(csv, suite.reports);
    }
    for (const auto& r : suite.reports) {
        for (const auto& w : r.warnings) err << "warning: task " << r.task << ": " << w << '\n';
    }
    for (const auto& f : suite.failures) err << "error: task " << f << '\n';
    out << "wrote " << (dir / "report.json").string() << " and " << (dir / "report.csv").string() << '\n';
    return suite.failures.empty() ? kExitOk : kExitError;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
    double delta = 0.0;
    double k_sup = 1.0;
    double mmd2 = 0.0;
    std::string targets;
    std::string out = "-";
    bool fig3 = false;
    bool signed_kernel = false;
    SeedFlags seed;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* mmd2_opt = nullptr;
};

CLI::App* add_bounds(CLI::App& app, BoundsArgs& a) {
    auto* sub = app.add_subcommand("bounds", "Threshold and delay bound versus ARL2FA target, as CSV");
    a.delta_opt = sub->add_option("--delta", a.delta, "KCUSUM delta");
    auto* k = sub->add_option("--k-sup", a.k_sup, "Sup norm of the kernel (default 1)");
    a.mmd2_opt = sub->add_option("--mmd2", a.mmd2, "Squared MMD between pre- and post-change laws");
    sub->add_option("--targets", a.targets, "ARL2FA targets: a:b:log[:N], a:b:lin[:step] or a list");
    sub->add_option("--out", a.out, "Output CSV path, or - for stdout");
    auto* fig3 = sub->add_flag("--fig3", a.fig3, "Preset mmd2 = 1/6, delta = 2^-5, k_sup = 0.5, targets 1:10000:lin");
    sub->add_flag("--signed-kernel", a.signed_kernel, "Use the delay constant for kernels that can be negative");
    fig3->excludes(a.delta_opt)->excludes(k)->excludes(a.mmd2_opt);
    add_seed_flags(sub, a.seed);
    return sub;
}

int cmd_bounds(const BoundsArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
    double delta = a.delta;
    double k_sup = a.k_sup;
    double mmd2 = a.mmd2;
    std::string targets = a.targets;
    if (a.fig3) {
        delta = std::ldexp(1.0, -5);
        k_sup = 0.5;
        mmd2 = 1.0 / 6.0;
        if (targets.empty()) targets = "1:10000:lin";
    } else if (!a.delta_opt->count() || !a.mmd2_opt->count()) {
        err << "error: --delta and --mmd2 are required unless --fig3 is given\n" << sub.help();
        return kExitError;
    }
    if (targets.empty()) targets = "1:10000:log";
    const TradeoffCurve curve = tradeoff_curve(delta, k_sup, mmd2, parse_grid_spec(targets), !a.signed_kernel);
    for (const auto& w : curve.warnings) err << "warning: " << w << '\n';
    OutputTarget target(a.out, out);
    std::ostream& os = target.stream();
    os << "arl2fa_target,h_required,esadd_bound\n";
    for (const TradeoffPoint& p : curve.points) {
        os << format_double(p.arl2fa_target) << ',' << format_double(p.h_required) << ','
           << format_double(p.esadd_bound) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
    int task = 0;
    bool example1 = false;
    std::string pre_dist;
    std::string post_dist;
    std::uint64_t change_at = 0;
    CLI::Option* change_opt = nullptr;
    std::uint64_t length = 0;
    std::string out = "-";
    std::string format;
    double uniform_half_width = BenchmarkOptions{}.uniform_half_width;
    bool fixed_component = false;
    SeedFlags seed;
};

CLI::App* add_generate(CLI::App& app, GenerateArgs& a) {
    auto* sub = app.add_subcommand("generate", "Write a synthetic stream with an optional change point");
    auto* task = sub->add_option("--task", a.task, "Benchmark task (1..4)")->check(CLI::Range(1, 4));
    auto* ex1 = sub->add_flag("--example1", a.example1, "N(1,1) before the change, N(1,4) after");
    auto* pre = sub->add_option("--pre-dist", a.pre_dist, "Config file for the pre-change law");
    auto* post = sub->add_option("--post-dist", a.post_dist, "Config file for the post-change law");
    task->excludes(ex1)->excludes(pre)->excludes(post);
    ex1->excludes(pre)->excludes(post);
    pre->needs(post);
    post->needs(pre);
    a.change_opt = sub->add_option("--change-at", a.change_at, "1-based index of the first post-change point");
    sub->add_option("--length", a.length, "Number of observations")->required();
    sub->add_option("--out", a.out, "Output path, or - for stdout");
    sub->add_option("--format", a.format, "csv or ndjson (default: from the file extension)");
    sub->add_option("--uniform-half-width", a.uniform_half_width, "Task 4 uniform half width");
    sub->add_flag("--fixed-component", a.fixed_component, "Task 3 always scales coordinate 0");
    add_seed_flags(sub, a.seed);
    return sub;
}

int cmd_generate(const GenerateArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
    std::optional<Distribution> pre;
    std::optional<Distribution> post;
    if (a.task != 0) {
        BenchmarkOptions opts;
        opts.uniform_half_width = a.uniform_half_width;
        opts.redraw_component = !a.fixed_component;
        const BenchmarkTask task = benchmark_task_from_int(a.task);
        pre = benchmark_pre_change();
        post = benchmark_post_change(task, opts);
    } else if (a.example1) {
        pre = variance_change_pre();
        post = variance_change_post();
    } else if (!a.pre_dist.empty()) {
        const auto pc = KeyValueConfig::load(a.pre_dist);
        pre = distribution_from_config(pc);
        reject_unused(pc);
        const auto qc = KeyValueConfig::load(a.post_dist);
        post = distribution_from_config(qc);
        reject_unused(qc);
        if (pre->dim() != post->dim()) throw ConfigError("pre- and post-change laws have different dimensions");
    } else {
        err << "error: choose --task N, --example1, or --pre-dist/--post-dist\n" << sub.help();
        return kExitError;
    }
    std::optional<std::uint64_t> change_at;
    if (a.change_opt->count()) {
        if (a.change_at < 1) throw ConfigError("--change-at is 1-based and must be >= 1");
        change_at = a.change_at;
    }
    const std::uint64_t seed = resolve_seed(a.seed, std::nullopt, err);
    SampledStream stream(std::move(*pre), std::move(*post), change_at, Rng(seed));
    OutputTarget target(a.out, out);
    const StreamFormat fmt = a.format.empty() ? format_for_path(a.out) : parse_stream_format(a.format);
    for (std::uint64_t i = 0; i < a.length; ++i) write_observation(target.stream(), *stream.next(), fmt);
    return kExitOk;
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    if (spec.find(':') == std::string::npos) return parse_double_list(spec, "grid");
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() < 3 || parts.size() > 4) {
        throw ConfigError("grid '" + spec + "' must look like a:b:log[:N] or a:b:lin[:step]");
    }
    const double lo = parse_double(parts[0], "grid start");
    const double hi = parse_double(parts[1], "grid end");
    if (hi < lo) throw ConfigError("grid '" + spec + "' ends before it starts");
    const std::string& mode = parts[2];
    if (mode != "log" && mode != "lin") throw ConfigError("grid spacing must be 'log' or 'lin', got '" + mode + "'");
    if (mode == "log" && !(lo > 0.0)) throw ConfigError("a log grid needs a positive start");
    if (lo == hi) return {lo};

    std::vector<double> out;
    if (mode == "log") {
        double n = 50;
        if (parts.size() == 4) {
            n = parse_double(parts[3], "grid point count");
            if (n < 2 || n != std::floor(n)) throw ConfigError("grid point count must be an integer >= 2");
        }
        const auto count = static_cast<std::size_t>(n);
        const double span = std::log(hi / lo);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(i + 1 == count ? hi : lo * std::exp(span * static_cast<double>(i) / (n - 1)));
        }
    } else {
        const double step = parts.size() == 4 ? parse_double(parts[3], "grid step") : 1.0;
        if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
        for (std::size_t i = 0;; ++i) {
            const double v = lo + step * static_cast<double>(i);
            if (v > hi + 1e-9 * step) break;
            out.push_back(v);
        }
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online change detection with CUSUM and kernel CUSUM", "kcusum"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    DetectArgs detect;
    EvaluateArgs evaluate;
    BoundsArgs bounds;
    GenerateArgs generate;
    auto* detect_cmd = add_detect(app, detect);
    auto* evaluate_cmd = add_evaluate(app, evaluate);
    auto* bounds_cmd = add_bounds(app, bounds);
    auto* generate_cmd = add_generate(app, generate);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (detect_cmd->parsed()) return cmd_detect(detect, in, out, err);
        if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate, *evaluate_cmd, out, err);
        if (bounds_cmd->parsed()) return cmd_bounds(bounds, *bounds_cmd, out, err);
        if (generate_cmd->parsed()) return cmd_generate(generate, *generate_cmd, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace kcusum::cli
