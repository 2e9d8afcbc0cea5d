#include "kcusum/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "kcusum/error.hpp"
#include "kcusum/mmd.hpp"

namespace kcusum {

namespace {

void require_threshold(double h) {
    if (std::isnan(h) || h < 0.0) {
        throw ConfigError("threshold h must be >= 0");
    }
}

void require_not_alarmed(const DetectorState& state) {
    if (state.alarmed) {
        throw UsageError("detector already alarmed at n = " + std::to_string(state.n) + "; reset it first");
    }
}

}  // namespace

DetectorState DetectorState::with_threshold(double h) {
    require_threshold(h);
    DetectorState s;
    s.h = h;
    return s;
}

DetectorState cusum_step(const DetectorState& state, double llr_value) {
    require_not_alarmed(state);
    if (!std::isfinite(llr_value)) {
        throw InputError("log-likelihood ratio is not finite");
    }
    DetectorState next = state;
    next.z = std::max(0.0, state.z + llr_value);
    next.n = state.n + 1;
    if (next.z >= next.h) {
        next.alarmed = true;
        next.alarm_time = next.n;
    }
    return next;
}

// ---------------------------------------------------------------------------

ReferenceSource::ReferenceSource(std::optional<Distribution> distribution,
                                 std::shared_ptr<const std::vector<Observation>> records, DatabasePolicy policy,
                                 Rng rng)
    : distribution_(std::move(distribution)), records_(std::move(records)), policy_(policy), rng_(std::move(rng)) {
    if (distribution_) {
        dim_ = distribution_->dim();
        return;
    }
    if (!records_ || records_->empty()) {
        throw InputError("reference database is empty");
    }
    dim_ = records_->front().dim();
    for (const auto& r : *records_) {
        if (r.dim() != dim_) {
            throw InputError("reference database records have inconsistent dimensions");
        }
    }
}

ReferenceSource ReferenceSource::sampler(Distribution distribution, Rng rng) {
    return ReferenceSource(std::move(distribution), nullptr, DatabasePolicy::FailOnExhaustion, std::move(rng));
}

ReferenceSource ReferenceSource::database(std::shared_ptr<const std::vector<Observation>> records,
                                          DatabasePolicy policy, Rng rng) {
    return ReferenceSource(std::nullopt, std::move(records), policy, std::move(rng));
}

void ReferenceSource::next_into(Observation& out) {
    if (distribution_) {
        distribution_->sample_into(rng_, out);
        ++consumed_;
        return;
    }
    const auto& recs = *records_;
    switch (policy_) {
        case DatabasePolicy::FailOnExhaustion:
            if (cursor_ >= recs.size()) {
                throw DataError("reference database exhausted after " + std::to_string(recs.size()) + " records");
            }
            out = recs[cursor_++];
            break;
        case DatabasePolicy::Cyclic:
            out = recs[cursor_];
            cursor_ = (cursor_ + 1) % recs.size();
            break;
        case DatabasePolicy::Resample:
            out = recs[rng_.index(recs.size())];
            break;
    }
    ++consumed_;
}

// ---------------------------------------------------------------------------

void KcusumConfig::validate() const {
    kernel.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConfigError("delta must be > 0");
    }
    const double limit = (kernel.nonnegative ? 2.0 : 4.0) * kernel.sup_bound;
    if (delta >= limit) {
        throw ConfigError("delta must be below " + std::to_string(limit) +
                          " for this kernel; otherwise g_delta <= 0 and no change is detectable");
    }
    require_threshold(h);
}

KcusumStepResult kcusum_step(const DetectorState& state, const KcusumConfig& config, const Observation& x,
                             KcusumPending& pending, ReferenceSource& reference) {
    require_not_alarmed(state);
    if (reference.dim() != x.dim()) {
        throw InputError("observation dimension " + std::to_string(x.dim()) +
                         " does not match reference dimension " + std::to_string(reference.dim()));
    }
    Observation y = Observation::zeros(x.dim());
    reference.next_into(y);

    KcusumStepResult out{state, 0.0, std::nullopt};
    out.state.n = state.n + 1;
    if (out.state.n % 2 == 1) {
        pending.x = x;
        pending.y = std::move(y);
        return out;
    }
    if (!pending.x || !pending.y) {
        throw UsageError("kcusum_step: even step without a pending odd-step pair");
    }
    const PairBlock block(*pending.x, x, *pending.y, y);
    out.increment = g_delta(config.kernel, block, config.delta);
    out.state.z = std::max(0.0, state.z + out.increment);
    pending.x.reset();
    pending.y.reset();
    if (out.state.z > out.state.h) {
        out.state.alarmed = true;
        out.state.alarm_time = out.state.n;
        out.alarm = AlarmEvent{out.state.n, out.state.z, "kcusum"};
    }
    return out;
}

// ---------------------------------------------------------------------------

CusumDetector::CusumDetector(LogDensityRatioModel llr, double h, std::string id)
    : llr_(std::move(llr)), state_(DetectorState::with_threshold(h)), id_(std::move(id)) {}

std::optional<AlarmEvent> CusumDetector::observe(const Observation& x) {
    return observe_llr(llr_(x));
}

std::optional<AlarmEvent> CusumDetector::observe_llr(double llr) {
    state_ = cusum_step(state_, llr);
    last_ = llr;
    if (state_.alarmed) {
        return AlarmEvent{state_.n, state_.z, id_};
    }
    return std::nullopt;
}

void CusumDetector::reset() {
    state_ = DetectorState::with_threshold(state_.h);
    last_ = 0.0;
}

KcusumDetector::KcusumDetector(KcusumConfig config, ReferenceSource reference, std::string id)
    : config_(config),
      reference_(std::move(reference)),
      state_(DetectorState::with_threshold(config.h)),
      id_(std::move(id)),
      prev_x_(Observation::zeros(reference_.dim())),
      prev_y_(prev_x_),
      cur_y_(prev_x_) {
    config_.validate();
}

std::optional<AlarmEvent> KcusumDetector::observe(const Observation& x) {
    require_not_alarmed(state_);
    if (x.dim() != reference_.dim()) {
        throw InputError("observation dimension " + std::to_string(x.dim()) +
                         " does not match reference dimension " + std::to_string(reference_.dim()));
    }
    // Same recursion as kcusum_step, with buffers reused across steps.
    const bool even = (state_.n + 1) % 2 == 0;
    if (!even) {
        reference_.next_into(prev_y_);
        prev_x_ = x;
        state_.n += 1;
        last_ = 0.0;
        return std::nullopt;
    }
    reference_.next_into(cur_y_);
    state_.n += 1;
    last_ = g_statistic(config_.kernel,
                        PairBlock::unchecked(prev_x_.values(), x.values(), prev_y_.values(), cur_y_.values())) -
            config_.delta;
    state_.z = std::max(0.0, state_.z + last_);
    if (state_.z > state_.h) {
        state_.alarmed = true;
        state_.alarm_time = state_.n;
        return AlarmEvent{state_.n, state_.z, id_};
    }
    return std::nullopt;
}

void KcusumDetector::reset(ReferenceSource reference) {
    if (reference.dim() != reference_.dim()) {
        throw InputError("replacement reference source has a different dimension");
    }
    reference_ = std::move(reference);
    state_ = DetectorState::with_threshold(config_.h);
    last_ = 0.0;
}

// ---------------------------------------------------------------------------

SampledStream::SampledStream(Distribution pre, Distribution post, std::optional<std::uint64_t> change_at, Rng rng)
    : pre_(std::move(pre)),
      post_(std::move(post)),
      change_at_(change_at),
      rng_(std::move(rng)),
      current_(Observation::zeros(pre_.dim())) {
    if (pre_.dim() != post_.dim()) {
        throw ConfigError("pre- and post-change laws have different dimensions");
    }
    if (change_at_ && *change_at_ == 0) {
        throw ConfigError("change point is 1-based and must be >= 1");
    }
}

const Observation* SampledStream::next() {
    ++index_;
    const bool changed = change_at_ && index_ >= *change_at_;
    (changed ? post_ : pre_).sample_into(rng_, current_);
    return &current_;
}

RunOutcome run_to_alarm(Detector& detector, ObservationSource& stream, std::uint64_t max_steps) {
    if (max_steps < 1) {
        throw ConfigError("max_steps must be >= 1");
    }
    RunOutcome out;
    while (out.steps < max_steps) {
        const Observation* x = stream.next();
        if (x == nullptr) {
            return out;
        }
        ++out.steps;
        if (auto alarm = detector.observe(*x)) {
            out.alarm = std::move(alarm);
            return out;
        }
    }
    out.censored = true;
    return out;
}

}  // namespace kcusum
