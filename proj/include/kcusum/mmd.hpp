#pragma once

#include <cstdint>
#include <span>

#include "kcusum/distributions.hpp"
#include "kcusum/kernels.hpp"
#include "kcusum/observation.hpp"

namespace kcusum {

/// Two consecutive stream points (x0, x1) and two reference points (y0, y1).
/// Non-owning: the viewed observations must outlive the block.
class PairBlock {
public:
    /// Throws InputError unless all four observations share one dimension.
    PairBlock(const Observation& x0, const Observation& x1, const Observation& y0, const Observation& y1);

    /// No dimension check. Used by the detector hot path.
    static PairBlock unchecked(std::span<const double> x0, std::span<const double> x1,
                               std::span<const double> y0, std::span<const double> y1) noexcept {
        return PairBlock(x0, x1, y0, y1);
    }

    std::span<const double> x0, x1, y0, y1;

private:
    PairBlock(std::span<const double> a, std::span<const double> b, std::span<const double> c,
              std::span<const double> d) noexcept
        : x0(a), x1(b), y0(c), y1(d) {}
};

/// g = k(x0,x1) + k(y0,y1) - k(x0,y1) - k(x1,y0), accumulated in that order.
[[nodiscard]] inline double g_statistic(const KernelSpec& spec, const PairBlock& b) noexcept {
    double g = kernel_eval_unchecked(spec, b.x0, b.x1);
    g += kernel_eval_unchecked(spec, b.y0, b.y1);
    g -= kernel_eval_unchecked(spec, b.x0, b.y1);
    g -= kernel_eval_unchecked(spec, b.x1, b.y0);
    return g;
}

/// g - delta. Throws ConfigError unless delta > 0.
[[nodiscard]] double g_delta(const KernelSpec& spec, const PairBlock& block, double delta);

/// Linear-time MMD^2 estimate: mean of g over the floor(n/2) disjoint pairs
/// (X[2i], X[2i+1]), (Y[2i], Y[2i+1]). A trailing odd element is dropped.
/// Throws InputError if |X| != |Y|, n < 2, or dimensions disagree.
[[nodiscard]] double rho_linear(const KernelSpec& spec, std::span<const Observation> xs,
                                std::span<const Observation> ys);

struct MmdEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

/// Monte Carlo estimate of d_k(p,q)^2 = E k(x,x') + E k(y,y') - 2 E k(x,y), from
/// n_samples independent quadruples (x, x' ~ p; y, y' ~ q). Work is split into
/// fixed-size chunks with one RNG stream per chunk and reduced in chunk order, so
/// the result depends only on the seed. Throws InputError if n_samples < 10^4.
[[nodiscard]] MmdEstimate mmd2_oracle(const KernelSpec& spec, const Distribution& p, const Distribution& q,
                                      std::uint64_t n_samples, std::uint64_t seed, unsigned threads = 0);

inline constexpr std::uint64_t kDefaultOracleSamples = 1'000'000;

}  // namespace kcusum
