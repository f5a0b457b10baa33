#pragma once

#include <cstdint>
#include <random>

namespace fatiq {

/// SplitMix64 finaliser, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of stream `stream_id` under `master_seed`:
/// splitmix64(master_seed ^ splitmix64(stream_id + 1)).
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
    return splitmix64(master_seed ^ splitmix64(stream_id + 1));
}

/// Reproducible random stream identified by (master_seed, stream_id).
///
/// Identical identifiers reproduce identical draws bit for bit. Uniform
/// variates are built directly from the engine output so they do not depend
/// on the standard library's distribution implementations.
class SeededRng {
public:
    using result_type = std::mt19937_64::result_type;

    explicit SeededRng(std::uint64_t master_seed, std::uint64_t stream_id = 0)
        : master_(master_seed), stream_(stream_id), engine_(stream_seed(master_seed, stream_id)) {}

    std::uint64_t master_seed() const noexcept { return master_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    /// A sibling stream under the same master seed.
    SeededRng derive(std::uint64_t stream_id) const { return SeededRng(master_, stream_id); }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // UniformRandomBitGenerator interface, for the std distributions.
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t master_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace fatiq
