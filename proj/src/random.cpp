#include "gwpeel/random.hpp"

#include <cmath>
#include <vector>

namespace gwpeel {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

__extension__ typedef unsigned __int128 u128;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {}

std::array<std::uint32_t, 4> RandomStream::philox_block(std::array<std::uint32_t, 4> ctr,
                                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void RandomStream::refill() noexcept {
    const std::array<std::uint32_t, 4> counter{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                           static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox_block(counter, key);
    ++block_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
}

RandomStream::result_type RandomStream::operator()() noexcept {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection of the biased low band.
    u128 m = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double log_factorial(std::uint64_t k) noexcept {
    static const std::vector<double> table = [] {
        std::vector<double> t(256);
        double acc = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            acc += std::log(static_cast<double>(i));
            t[i] = acc;
        }
        return t;
    }();
    if (k < table.size()) return table[k];
    // Stirling series; the first omitted term is below 1e-17 for k >= 256.
    const double x = static_cast<double>(k);
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return x * std::log(x) - x + 0.5 * std::log(2.0 * M_PI * x) +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)));
}

std::uint64_t sample_binomial(RandomStream& rng, std::uint64_t trials, double p) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    if (p > 0.5) return trials - sample_binomial(rng, trials, 1.0 - p);

    const double n = static_cast<double>(trials);
    const double q = 1.0 - p;
    const double odds = p / q;

    if (n * p < 30.0) {
        const double p0 = std::exp(n * std::log1p(-p));
        for (;;) {
            double u = rng.uniform();
            double pmf = p0;
            for (std::uint64_t k = 0; k <= trials; ++k) {
                if (u < pmf) return k;
                u -= pmf;
                pmf *= odds * static_cast<double>(trials - k) / static_cast<double>(k + 1);
                if (pmf == 0.0) break;
            }
            // Rounding left u above the total mass; redraw.
        }
    }

    const auto mode = static_cast<std::uint64_t>(std::floor((n + 1.0) * p));
    const double log_pmode = log_factorial(trials) - log_factorial(mode) -
                             log_factorial(trials - mode) + static_cast<double>(mode) * std::log(p) +
                             static_cast<double>(trials - mode) * std::log1p(-p);
    const double pmode = std::exp(log_pmode);
    for (;;) {
        double u = rng.uniform();
        if (u < pmode) return mode;
        u -= pmode;
        std::uint64_t lo = mode, hi = mode;
        double plo = pmode, phi = pmode;
        while (lo > 0 || hi < trials) {
            if (lo > 0) {
                plo *= static_cast<double>(lo) / (static_cast<double>(trials - lo + 1) * odds);
                --lo;
                if (u < plo) return lo;
                u -= plo;
            }
            if (hi < trials) {
                phi *= odds * static_cast<double>(trials - hi) / static_cast<double>(hi + 1);
                ++hi;
                if (u < phi) return hi;
                u -= phi;
            }
            if (plo < 1e-300 && phi < 1e-300) break;
        }
    }
}

}  // namespace gwpeel
