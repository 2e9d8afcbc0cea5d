// Acceptance driver: one PASS/FAIL line per criterion.
//
// Criteria 1-9 run into <report-dir>/primary. Criterion 10 reruns them with a
// different thread count into <report-dir>/rerun and byte-compares the reports.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "criteria.hpp"

namespace fs = std::filesystem;
using acceptance::Context;
using acceptance::Criterion;
using acceptance::Outcome;

namespace {

std::string seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

void print_line(int id, bool pass, const std::string& name, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << name << " | " << detail << "\n";
    std::cout.flush();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct RunSummary {
    std::vector<int> ids;
    std::vector<bool> verdicts;
};

RunSummary run_all(const Context& ctx, const std::set<int>& only, bool verbose) {
    fs::create_directories(ctx.report_dir);
    RunSummary s;
    for (const Criterion& c : acceptance::all_criteria()) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(ctx);
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit_s <= 0 || dt <= c.time_limit_s;
        const bool pass = o.pass && in_time;

        nlohmann::json doc{{"criterion", c.id}, {"name", c.name}, {"pass", o.pass}, {"evidence", o.report}};
        std::ofstream(ctx.report_dir / ("criterion_" + std::to_string(c.id) + ".json")) << doc.dump(2) << "\n";

        s.ids.push_back(c.id);
        s.verdicts.push_back(pass);
        if (verbose) {
            std::string detail = o.summary + " [" + seconds(dt);
            if (c.time_limit_s > 0) detail += (in_time ? " <= " : " > ") + seconds(c.time_limit_s) + " limit";
            detail += "]";
            print_line(c.id, pass, c.name, detail);
            for (const auto& n : o.notes) std::cout << "    note: " << n << "\n";
        }
    }
    return s;
}

// Returns the names of files that differ or exist on only one side.
std::vector<std::string> compare_dirs(const fs::path& a, const fs::path& b, std::size_t* compared) {
    std::set<std::string> names;
    for (const auto& dir : {a, b}) {
        if (!fs::is_directory(dir)) continue;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file()) names.insert(e.path().filename().string());
        }
    }
    std::vector<std::string> diffs;
    for (const auto& n : names) {
        if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) diffs.push_back(n);
    }
    *compared = names.size();
    return diffs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for the kcusum library"};
    Context ctx;
    std::string report_dir = "acceptance_reports";
    unsigned rerun_threads = 3;
    std::vector<int> only;
    std::vector<std::string> compare;
    app.add_option("--report-dir", report_dir, "Directory for per-criterion evidence")->capture_default_str();
    app.add_option("--seed", ctx.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", ctx.threads, "Worker threads for the primary run")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--rerun-threads", rerun_threads, "Worker threads for the determinism rerun (0 skips it)")
        ->capture_default_str();
    app.add_option("--only", only, "Run only these criteria (1-9)")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_option("--compare", compare, "Only byte-compare two existing report directories")->expected(2);
    CLI11_PARSE(app, argc, argv);

    if (!compare.empty()) {
        std::size_t n = 0;
        const auto diffs = compare_dirs(compare[0], compare[1], &n);
        const bool pass = n > 0 && diffs.empty();
        print_line(10, pass, "determinism",
                   std::to_string(n - diffs.size()) + "/" + std::to_string(n) + " report files identical");
        for (const auto& d : diffs) std::cout << "    differs: " << d << "\n";
        return pass ? 0 : 1;
    }

    const std::set<int> only_set(only.begin(), only.end());
    const fs::path root = report_dir;
    const fs::path primary_dir = root / "primary";
    const fs::path rerun_dir = root / "rerun";
    fs::remove_all(primary_dir);
    fs::remove_all(rerun_dir);

    std::cout << "acceptance: seed " << ctx.seed << ", " << ctx.threads << " thread(s), reports in " << primary_dir.string()
              << "\n";
    ctx.report_dir = primary_dir;
    const RunSummary first = run_all(ctx, only_set, true);
    bool all_pass = true;
    for (bool v : first.verdicts) all_pass = all_pass && v;

    bool det_pass = false;
    std::string det_detail;
    if (rerun_threads == 0 || rerun_threads == ctx.threads) {
        det_detail = "not run (rerun thread count must differ from the primary run and be nonzero)";
    } else {
        std::cout << "acceptance: rerunning with " << rerun_threads << " thread(s) into " << rerun_dir.string() << "\n";
        Context again = ctx;
        again.threads = rerun_threads;
        again.report_dir = rerun_dir;
        const RunSummary second = run_all(again, only_set, false);
        std::size_t n = 0;
        const auto diffs = compare_dirs(primary_dir, rerun_dir, &n);
        det_pass = n > 0 && diffs.empty() && second.verdicts == first.verdicts;
        det_detail = std::to_string(n - diffs.size()) + "/" + std::to_string(n) + " report files byte-identical (" +
                     std::to_string(ctx.threads) + " vs " + std::to_string(rerun_threads) + " threads)";
        if (second.verdicts != first.verdicts) det_detail += "; verdicts differ between runs";
        for (const auto& d : diffs) det_detail += "; differs: " + d;
    }
    print_line(10, det_pass, "determinism", det_detail);
    all_pass = all_pass && det_pass;

    std::cout << "acceptance: " << (all_pass ? "all criteria passed" : "some criteria failed") << "\n";
    return all_pass ? 0 : 1;
}
