#include "kcusum/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kcusum/error.hpp"
#include "kcusum/parallel.hpp"
#include "kcusum/running_stats.hpp"

namespace kcusum {

namespace {

void require_h(double h) {
    if (std::isnan(h) || h < 0.0) {
        throw ConfigError("threshold h must be >= 0");
    }
}

void require_kcusum_params(double delta, double k_sup) {
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    if (!(k_sup > 0.0)) throw ConfigError("k_sup must be > 0");
}

double log_mgf(std::span<const double> a, double q) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : a) peak = std::max(peak, q * v);
    double s = 0.0;
    for (double v : a) s += std::exp(q * v - peak);
    return peak + std::log(s / static_cast<double>(a.size()));
}

constexpr std::uint64_t kLlrStream = 0x6c6c72;  // "llr"
constexpr std::uint64_t kLlrChunk = 1u << 14;

}  // namespace

double cusum_arl2fa_lower(double h) {
    require_h(h);
    return std::exp(h);
}

double cusum_esadd_upper(const BoundInputs& in) {
    require_h(in.h);
    if (!(in.kl_forward > 0.0)) {
        throw ConfigError("KL(p1,p0) must be > 0 for the CUSUM delay bound");
    }
    if (!std::isfinite(in.second_moment_pos) || in.second_moment_pos < 0.0) {
        throw ConfigError("second_moment_pos must be finite and >= 0");
    }
    return in.h / in.kl_forward + in.second_moment_pos / (in.kl_forward * in.kl_forward);
}

double kcusum_rate_r(double delta, double k_sup) {
    require_kcusum_params(delta, k_sup);
    const double scale = 4.0 * k_sup;
    return std::log1p(delta / scale) / scale;
}

double kcusum_arl2fa_lower(double h, double delta, double k_sup) {
    require_h(h);
    require_kcusum_params(delta, k_sup);
    if (delta >= 2.0 * k_sup) {
        throw ConfigError("the KCUSUM false-alarm bound needs delta < 2 k_sup");
    }
    return 2.0 * std::exp(kcusum_rate_r(delta, k_sup) * h);
}

double kcusum_threshold_for_arl2fa(double target, double delta, double k_sup) {
    if (!(target > 0.0)) throw ConfigError("ARL2FA target must be > 0");
    const double r = kcusum_rate_r(delta, k_sup);
    return std::max(0.0, std::log(target / 2.0) / r);
}

double kcusum_esadd_upper(const BoundInputs& in) {
    require_h(in.h);
    require_kcusum_params(in.delta, in.k_sup);
    if (!(in.mmd2 > in.delta)) {
        std::ostringstream os;
        os << "change is undetectable: d_k^2 = " << in.mmd2 << " must exceed delta = " << in.delta;
        throw UndetectableChangeError(os.str());
    }
    const double gap = in.mmd2 - in.delta;
    const double c = in.kernel_nonnegative ? 8.0 : 16.0;
    return 2.0 * in.h / gap + c * in.k_sup * in.k_sup / (gap * gap);
}

double supermartingale_tail_bound(double q, double h) {
    if (!(q > 0.0)) throw ConfigError("q must be > 0");
    require_h(h);
    return std::exp(-q * h);
}

MgfEstimate empirical_mgf(std::span<const double> increments, double q) {
    if (increments.empty()) throw InputError("empirical_mgf: empty sample");
    RunningStats s;
    for (double a : increments) s.push(std::exp(q * a));
    return {s.mean(), s.std_error()};
}

std::optional<double> find_q(std::span<const double> increments, double tolerance, const FindQOptions& options) {
    if (increments.empty()) throw InputError("find_q: empty sample");
    if (!(tolerance >= 0.0 && tolerance < 1.0)) throw ConfigError("find_q: tolerance must be in [0, 1)");
    if (!(options.q_max > 0.0)) throw ConfigError("find_q: q_max must be > 0");

    const double level = std::log1p(-tolerance);
    auto f = [&](double q) { return log_mgf(increments, q); };

    if (f(options.q_max) <= level) return options.q_max;

    // log M is convex with log M(0) = 0: locate its minimiser, then bisect the
    // right-hand crossing of `level` between the minimiser and q_max.
    double lo = 0.0;
    double hi = options.q_max;
    constexpr double kInvPhi = 0.6180339887498949;
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < options.iterations && hi - lo > 1e-12 * options.q_max; ++i) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    double feasible = 0.5 * (lo + hi);
    if (!(feasible > 0.0) || f(feasible) > level) return std::nullopt;

    double infeasible = options.q_max;
    for (int i = 0; i < options.iterations && infeasible - feasible > 1e-12 * infeasible; ++i) {
        const double mid = 0.5 * (feasible + infeasible);
        if (f(mid) <= level) {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    return feasible;
}

double lorden_first_passage_upper(double mu, double second_moment_pos, double b, double a, double alpha) {
    if (!(mu > 0.0)) throw ConfigError("drift mu must be > 0");
    if (!(a <= 0.0 && 0.0 <= b)) throw ConfigError("boundaries must satisfy a <= 0 <= b");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(second_moment_pos >= 0.0)) throw ConfigError("second_moment_pos must be >= 0");
    return ((1.0 - alpha) * b + alpha * a) / mu + second_moment_pos / (mu * mu);
}

TradeoffCurve tradeoff_curve(double delta, double k_sup, double mmd2, std::vector<double> targets,
                             bool kernel_nonnegative) {
    require_kcusum_params(delta, k_sup);
    if (delta >= 2.0 * k_sup) {
        throw ConfigError("the KCUSUM false-alarm bound needs delta < 2 k_sup");
    }
    std::sort(targets.begin(), targets.end());
    const double r = kcusum_rate_r(delta, k_sup);

    TradeoffCurve curve;
    curve.points.reserve(targets.size());
    for (double x : targets) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw ConfigError("ARL2FA targets must be positive and finite");
        }
        TradeoffPoint pt;
        pt.arl2fa_target = x;
        if (x < 2.0) {
            pt.clamped = true;
            std::ostringstream os;
            os << "target " << x << " is below the bound's minimum of 2; using h = 0";
            curve.warnings.push_back(os.str());
        }
        pt.h_required = std::max(0.0, std::log(x / 2.0) / r);
        BoundInputs in;
        in.h = pt.h_required;
        in.delta = delta;
        in.k_sup = k_sup;
        in.mmd2 = mmd2;
        in.kernel_nonnegative = kernel_nonnegative;
        pt.esadd_bound = kcusum_esadd_upper(in);
        curve.points.push_back(pt);
    }
    return curve;
}

LlrMoments estimate_llr_moments(const LogDensityRatioModel& llr, const Distribution& law, std::uint64_t n_samples,
                                std::uint64_t seed, unsigned threads) {
    if (n_samples < 2) throw InputError("estimate_llr_moments needs at least two samples");
    if (llr.dim() != law.dim()) throw InputError("llr model and law have different dimensions");

    const std::uint64_t n_chunks = (n_samples + kLlrChunk - 1) / kLlrChunk;
    std::vector<RunningStats> means(n_chunks);
    std::vector<RunningStats> seconds(n_chunks);
    parallel_for(n_chunks, threads, [&](std::size_t c) {
        Rng rng(seed, {kLlrStream, c});
        Observation x = Observation::zeros(law.dim());
        const std::uint64_t end = std::min(n_samples, (c + 1) * kLlrChunk);
        for (std::uint64_t i = c * kLlrChunk; i < end; ++i) {
            law.sample_into(rng, x);
            const double v = llr.evaluate_unchecked(x.values());
            const double pos = std::max(0.0, v);
            means[c].push(v);
            seconds[c].push(pos * pos);
        }
    });
    RunningStats m;
    RunningStats s;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        m.merge(means[c]);
        s.merge(seconds[c]);
    }
    return {m.mean(), m.std_error(), s.mean(), s.std_error(), n_samples, seed};
}

}  // namespace kcusum
