#include "kcusum/mmd.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "kcusum/error.hpp"
#include "kcusum/parallel.hpp"
#include "kcusum/running_stats.hpp"

namespace kcusum {

namespace {

constexpr std::uint64_t kOracleStream = 0x6d6d64;  // "mmd"
constexpr std::uint64_t kOracleChunk = 1u << 14;

}  // namespace

PairBlock::PairBlock(const Observation& a, const Observation& b, const Observation& c, const Observation& d)
    : x0(a.values()), x1(b.values()), y0(c.values()), y1(d.values()) {
    require_same_dim(a, b);
    require_same_dim(a, c);
    require_same_dim(a, d);
}

double g_delta(const KernelSpec& spec, const PairBlock& block, double delta) {
    if (!(delta > 0.0)) {
        throw ConfigError("delta must be > 0");
    }
    return g_statistic(spec, block) - delta;
}

double rho_linear(const KernelSpec& spec, std::span<const Observation> xs, std::span<const Observation> ys) {
    if (xs.size() != ys.size()) {
        throw InputError("rho_linear: |X| = " + std::to_string(xs.size()) + " but |Y| = " + std::to_string(ys.size()));
    }
    if (xs.size() < 2) {
        throw InputError("rho_linear needs at least two observations per set");
    }
    const std::size_t blocks = xs.size() / 2;
    double sum = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        sum += g_statistic(spec, PairBlock(xs[2 * i], xs[2 * i + 1], ys[2 * i], ys[2 * i + 1]));
    }
    return sum / static_cast<double>(blocks);
}

MmdEstimate mmd2_oracle(const KernelSpec& spec, const Distribution& p, const Distribution& q,
                        std::uint64_t n_samples, std::uint64_t seed, unsigned threads) {
    if (n_samples < 10'000) {
        throw InputError("mmd2_oracle needs n_samples >= 10000");
    }
    if (p.dim() != q.dim()) {
        throw InputError("mmd2_oracle: distributions have different dimensions");
    }
    spec.validate();

    const std::uint64_t n_chunks = (n_samples + kOracleChunk - 1) / kOracleChunk;
    std::vector<RunningStats> partial(n_chunks);

    parallel_for(n_chunks, threads, [&](std::size_t c) {
        Rng rng(seed, {kOracleStream, c});
        const std::uint64_t begin = c * kOracleChunk;
        const std::uint64_t end = std::min(n_samples, begin + kOracleChunk);
        Observation x = Observation::zeros(p.dim());
        Observation xp = x;
        Observation y = x;
        Observation yp = x;
        RunningStats acc;
        for (std::uint64_t i = begin; i < end; ++i) {
            p.sample_into(rng, x);
            p.sample_into(rng, xp);
            q.sample_into(rng, y);
            q.sample_into(rng, yp);
            // Cross terms use disjoint pairs so every kernel evaluation is over independent points.
            acc.push(g_statistic(spec, PairBlock::unchecked(x.values(), xp.values(), y.values(), yp.values())));
        }
        partial[c] = acc;
    });

    RunningStats total;
    for (const auto& s : partial) {
        total.merge(s);
    }
    return {total.mean(), total.std_error(), n_samples};
}

}  // namespace kcusum
