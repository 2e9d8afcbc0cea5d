#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcusum/distributions.hpp"

namespace kcusum {

/// Quantities the analytic performance bounds are written in.
struct BoundInputs {
    double h = 0.0;
    double delta = 0.0;
    double k_sup = 1.0;               ///< sup-norm of the kernel
    double mmd2 = 0.0;                ///< d_k(p0,p1)^2
    double kl_forward = 0.0;          ///< KL(p1 || p0)
    double second_moment_pos = 0.0;   ///< E_1[((llr)^+)^2]
    bool kernel_nonnegative = true;
};

/// ARL2FA(CUSUM) >= exp(h).
[[nodiscard]] double cusum_arl2fa_lower(double h);

/// ESADD(CUSUM) <= h / KL(p1,p0) + E_1[((llr)^+)^2] / KL(p1,p0)^2.
/// Throws ConfigError if kl_forward <= 0.
[[nodiscard]] double cusum_esadd_upper(const BoundInputs& in);

/// r = log(1 + delta / (4 k_sup)) / (4 k_sup): a point where the MGF of the
/// KCUSUM block increment under p0 is guaranteed to be <= 1.
[[nodiscard]] double kcusum_rate_r(double delta, double k_sup);

/// ARL2FA(KCUSUM) >= 2 exp(r h). Requires 0 < delta < 2 k_sup.
[[nodiscard]] double kcusum_arl2fa_lower(double h, double delta, double k_sup);

/// Smallest h with kcusum_arl2fa_lower(h) >= target, clamped at 0.
[[nodiscard]] double kcusum_threshold_for_arl2fa(double target, double delta, double k_sup);

/// ESADD(KCUSUM) <= 2h / (mmd2 - delta) + C k_sup^2 / (mmd2 - delta)^2, with
/// C = 8 for nonnegative kernels (g_delta^+ <= 2 k_sup) and C = 16 otherwise
/// (|g_delta| <= 4 k_sup). Throws UndetectableChangeError if mmd2 <= delta.
[[nodiscard]] double kcusum_esadd_upper(const BoundInputs& in);

/// P(sup_n S_n > h) <= exp(-q h) for a walk whose increment MGF satisfies M(q) <= 1.
[[nodiscard]] double supermartingale_tail_bound(double q, double h);

struct FindQOptions {
    double q_max = 64.0;
    int iterations = 200;
};

/// Largest q in (0, q_max] with empirical M(q) = mean(exp(q a_i)) <= 1 - tolerance,
/// or nullopt if none exists (always the case when mean(a) >= 0). M is evaluated
/// in log space. Throws InputError on an empty sample and ConfigError unless
/// 0 <= tolerance < 1.
[[nodiscard]] std::optional<double> find_q(std::span<const double> increments, double tolerance,
                                           const FindQOptions& options = {});

struct MgfEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample mean of exp(q a_i) and its standard error.
[[nodiscard]] MgfEstimate empirical_mgf(std::span<const double> increments, double q);

/// Lorden's bound on the exit time of a positive-drift walk from [a, b]:
/// E[T] <= ((1 - alpha) b + alpha a) / mu + E[(a_1^+)^2] / mu^2.
/// The one-sided form used for first passage above b is a = 0, alpha = 0.
[[nodiscard]] double lorden_first_passage_upper(double mu, double second_moment_pos, double b, double a = 0.0,
                                                double alpha = 0.0);

struct TradeoffPoint {
    double arl2fa_target = 0.0;
    double h_required = 0.0;
    double esadd_bound = 0.0;
    bool clamped = false;  ///< target below 2, the bound's value at h = 0
};

struct TradeoffCurve {
    std::vector<TradeoffPoint> points;
    std::vector<std::string> warnings;
};

/// For each ARL2FA target x: the smallest threshold the false-alarm bound
/// guarantees, h = max(0, log(x/2) / r), and the delay bound at that h.
/// Points come back sorted by target. Throws UndetectableChangeError if mmd2 <= delta.
[[nodiscard]] TradeoffCurve tradeoff_curve(double delta, double k_sup, double mmd2, std::vector<double> targets,
                                           bool kernel_nonnegative = true);

/// Moments of the log-likelihood ratio under a law, by seeded Monte Carlo.
struct LlrMoments {
    double mean = 0.0;
    double mean_se = 0.0;
    double second_moment_pos = 0.0;     ///< E[((llr)^+)^2]
    double second_moment_pos_se = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

[[nodiscard]] LlrMoments estimate_llr_moments(const LogDensityRatioModel& llr, const Distribution& law,
                                              std::uint64_t n_samples, std::uint64_t seed, unsigned threads = 0);

}  // namespace kcusum
