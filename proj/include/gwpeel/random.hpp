#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace gwpeel {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The key is the 64-bit seed and the upper half of the 128-bit counter is the
/// stream id, so every (seed, stream_id) pair names an independent stream and
/// the output is identical on every platform. Models
/// std::uniform_random_bit_generator, but the distributions below should be
/// preferred over the std:: ones, whose algorithms are implementation-defined.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    /// Stream format version; bump if the output mapping ever changes.
    static constexpr int kVersion = 1;

    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// One raw Philox4x32-10 block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key) noexcept;

  private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

/// Binomial(trials, p) by inversion: from zero for small means, otherwise a
/// chop-down search alternating outwards from the mode (O(sqrt(n p q)) steps).
std::uint64_t sample_binomial(RandomStream& rng, std::uint64_t trials, double p);

/// Fisher-Yates shuffle driven by RandomStream::below.
template <class T>
void shuffle(std::span<T> items, RandomStream& rng) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// log(k!) without libm lgamma (which is not reentrant and varies by platform).
double log_factorial(std::uint64_t k) noexcept;

}  // namespace gwpeel
