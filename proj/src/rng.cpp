#include "kcusum/rng.hpp"

#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace kcusum {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master_seed, std::span<const std::uint64_t> ids) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (ids.size() + 1));
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master_seed);
    for (std::uint64_t id : ids) {
        push(id);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t master_seed, std::initializer_list<std::uint64_t> stream_ids)
    : engine_(seeded_engine(master_seed, std::span<const std::uint64_t>(stream_ids.begin(), stream_ids.size()))) {}

Rng::Rng(std::uint64_t master_seed, std::span<const std::uint64_t> stream_ids)
    : engine_(seeded_engine(master_seed, stream_ids)) {}

double Rng::normal() {
    return boost::random::normal_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::size_t Rng::index(std::size_t n) {
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace kcusum
