#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcusum/distributions.hpp"
#include "kcusum/kernels.hpp"
#include "kcusum/observation.hpp"
#include "kcusum/rng.hpp"

namespace kcusum {

/// Running statistic of a reflected cumulative-sum detector.
///
/// z >= 0 always. Once alarmed the state is frozen: alarm_time == n and further
/// steps throw UsageError until the detector is reset.
struct DetectorState {
    double z = 0.0;
    std::uint64_t n = 0;
    double h = 0.0;
    bool alarmed = false;
    std::optional<std::uint64_t> alarm_time;

    /// Fresh state; h must be >= 0 (+inf allowed, meaning "never alarm").
    static DetectorState with_threshold(double h);

    friend bool operator==(const DetectorState&, const DetectorState&) = default;
};

struct AlarmEvent {
    std::uint64_t time = 0;
    double statistic_at_alarm = 0.0;
    std::string detector_id;

    friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

/// CUSUM recursion: z' = max(0, z + llr), n' = n + 1, alarm iff z' >= h.
/// Throws UsageError on an alarmed state and InputError on a non-finite llr.
[[nodiscard]] DetectorState cusum_step(const DetectorState& state, double llr_value);

// ---------------------------------------------------------------------------
// Reference samples for KCUSUM.

enum class DatabasePolicy {
    FailOnExhaustion,  ///< throw DataError after the last record
    Cyclic,            ///< wrap around to the first record
    Resample,          ///< draw records uniformly with replacement
};

/// Supplier of reference observations y_1, y_2, ...: either a live sampler of
/// the pre-change law or a finite database of pre-change records.
class ReferenceSource {
public:
    static ReferenceSource sampler(Distribution distribution, Rng rng);
    /// `rng` is only consulted under DatabasePolicy::Resample.
    static ReferenceSource database(std::shared_ptr<const std::vector<Observation>> records, DatabasePolicy policy,
                                    Rng rng = Rng(0));

    /// Writes the next reference observation into `out`.
    void next_into(Observation& out);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::uint64_t consumed() const noexcept { return consumed_; }

private:
    ReferenceSource(std::optional<Distribution> distribution, std::shared_ptr<const std::vector<Observation>> records,
                    DatabasePolicy policy, Rng rng);

    std::optional<Distribution> distribution_;
    std::shared_ptr<const std::vector<Observation>> records_;
    DatabasePolicy policy_ = DatabasePolicy::FailOnExhaustion;
    Rng rng_;
    std::size_t cursor_ = 0;
    std::size_t dim_ = 0;
    std::uint64_t consumed_ = 0;
};

struct KcusumConfig {
    KernelSpec kernel = KernelSpec::gaussian();
    double delta = 0.0;
    double h = 0.0;

    /// delta > 0; delta < 2 sup|k| for a nonnegative kernel (4 sup|k| otherwise),
    /// since beyond that g_delta <= 0 and no change can ever be detected; h >= 0.
    void validate() const;
};

/// The observation/reference pair held over from an odd step.
struct KcusumPending {
    std::optional<Observation> x;
    std::optional<Observation> y;
};

struct KcusumStepResult {
    DetectorState state;
    double increment = 0.0;  ///< v_n (0 on odd steps)
    std::optional<AlarmEvent> alarm;
};

/// One KCUSUM step. Draws one reference point per call. At odd n the pair
/// (x_n, y_n) is parked in `pending` and z is unchanged; at even n
/// v_n = g_delta((x_{n-1}, x_n), (y_{n-1}, y_n)), z' = max(0, z + v_n), and the
/// detector alarms iff z' > h (strict). Alarms therefore only occur at even n.
[[nodiscard]] KcusumStepResult kcusum_step(const DetectorState& state, const KcusumConfig& config,
                                           const Observation& x, KcusumPending& pending, ReferenceSource& reference);

// ---------------------------------------------------------------------------
// Stateful detectors sharing one stepping interface.

class Detector {
public:
    virtual ~Detector() = default;

    /// Consumes one observation; returns the alarm if this step raised it.
    virtual std::optional<AlarmEvent> observe(const Observation& x) = 0;
    [[nodiscard]] virtual const DetectorState& state() const noexcept = 0;
    /// Increment applied by the most recent step (llr for CUSUM, v_n for KCUSUM).
    [[nodiscard]] virtual double last_increment() const noexcept = 0;
    /// true for "z >= h" (CUSUM), false for "z > h" (KCUSUM).
    [[nodiscard]] virtual bool inclusive_threshold() const noexcept = 0;
    [[nodiscard]] virtual const std::string& id() const noexcept = 0;

    [[nodiscard]] bool crosses(double z, double h) const noexcept {
        return inclusive_threshold() ? z >= h : z > h;
    }
};

class CusumDetector final : public Detector {
public:
    CusumDetector(LogDensityRatioModel llr, double h, std::string id = "cusum");

    std::optional<AlarmEvent> observe(const Observation& x) override;
    /// Feeds a precomputed log-likelihood ratio directly.
    std::optional<AlarmEvent> observe_llr(double llr);

    [[nodiscard]] const DetectorState& state() const noexcept override { return state_; }
    [[nodiscard]] double last_increment() const noexcept override { return last_; }
    [[nodiscard]] bool inclusive_threshold() const noexcept override { return true; }
    [[nodiscard]] const std::string& id() const noexcept override { return id_; }

    /// Back to z = 0, n = 0 with the same threshold.
    void reset();

private:
    LogDensityRatioModel llr_;
    DetectorState state_;
    double last_ = 0.0;
    std::string id_;
};

class KcusumDetector final : public Detector {
public:
    KcusumDetector(KcusumConfig config, ReferenceSource reference, std::string id = "kcusum");

    std::optional<AlarmEvent> observe(const Observation& x) override;

    [[nodiscard]] const DetectorState& state() const noexcept override { return state_; }
    [[nodiscard]] double last_increment() const noexcept override { return last_; }
    [[nodiscard]] bool inclusive_threshold() const noexcept override { return false; }
    [[nodiscard]] const std::string& id() const noexcept override { return id_; }
    [[nodiscard]] const KcusumConfig& config() const noexcept { return config_; }
    [[nodiscard]] const ReferenceSource& reference() const noexcept { return reference_; }

    /// Back to z = 0, n = 0 with a new reference source.
    void reset(ReferenceSource reference);

private:
    KcusumConfig config_;
    ReferenceSource reference_;
    DetectorState state_;
    double last_ = 0.0;
    std::string id_;
    // Hot-path buffers: x_{n-1}, y_{n-1}, y_n.
    Observation prev_x_;
    Observation prev_y_;
    Observation cur_y_;
};

// ---------------------------------------------------------------------------
// Driving a detector over a stream.

/// Pull-based observation stream. The returned pointer stays valid until the
/// next call; nullptr marks the end of the stream.
class ObservationSource {
public:
    virtual ~ObservationSource() = default;
    virtual const Observation* next() = 0;
};

/// Replays a fixed sequence.
class VectorSource final : public ObservationSource {
public:
    explicit VectorSource(std::span<const Observation> data) : data_(data) {}
    const Observation* next() override { return pos_ < data_.size() ? &data_[pos_++] : nullptr; }

private:
    std::span<const Observation> data_;
    std::size_t pos_ = 0;
};

/// Endless stream drawing from `pre` before the change and from `post` from
/// observation index `change_at` (1-based) onwards. No change if change_at is empty.
class SampledStream final : public ObservationSource {
public:
    SampledStream(Distribution pre, Distribution post, std::optional<std::uint64_t> change_at, Rng rng);
    const Observation* next() override;

private:
    Distribution pre_;
    Distribution post_;
    std::optional<std::uint64_t> change_at_;
    Rng rng_;
    std::uint64_t index_ = 0;
    Observation current_;
};

struct RunOutcome {
    std::optional<AlarmEvent> alarm;
    std::uint64_t steps = 0;
    /// max_steps observations consumed without an alarm.
    bool censored = false;
};

/// Steps `detector` over `stream` until an alarm, the end of the stream, or
/// max_steps observations (max_steps >= 1, else ConfigError).
RunOutcome run_to_alarm(Detector& detector, ObservationSource& stream, std::uint64_t max_steps);

}  // namespace kcusum
