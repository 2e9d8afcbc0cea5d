#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace kcusum {

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Streams are derived by feeding (master_seed, id_0, id_1, ...) as
/// 32-bit words into std::seed_seq, which is also fully specified. Variates come
/// from Boost.Random distributions (ziggurat normal, canonical uniforms), whose
/// algorithms are header code rather than implementation-defined, so a given
/// (seed, ids) pair yields the same numbers on every conforming platform.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}
    Rng(std::uint64_t master_seed, std::initializer_list<std::uint64_t> stream_ids);
    Rng(std::uint64_t master_seed, std::span<const std::uint64_t> stream_ids);

    /// Standard normal variate.
    double normal();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform index in [0, n); n >= 1.
    std::size_t index(std::size_t n);

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
};

/// Nondeterministic seed from std::random_device, for explicit opt-in use only.
std::uint64_t entropy_seed();

}  // namespace kcusum
