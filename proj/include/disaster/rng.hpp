#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace disaster {

// Philox4x32-10 (Salmon et al., SC'11).  Pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

// One reproducible stream per (seed, stream id): the key holds the seed, the
// upper counter words hold the stream id, the lower words count blocks.
// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class Stream {
public:
    using result_type = std::uint32_t;

    Stream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (index_ == 4) refill();
        return buffer_[index_++];
    }

    // Uniform on the open interval (0,1) with 53 random bits.
    double uniform() {
        std::uint64_t a = (*this)() >> 5;
        std::uint64_t b = (*this)() >> 6;
        return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Number of failures before the first success, success probability p in (0,1].
    std::uint64_t geometric(double p) {
        if (p >= 1.0) return 0;
        double g = std::floor(std::log(uniform()) / std::log1p(-p));
        return g >= 9.2e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(g);
    }

    std::uint64_t blocks_used() const { return position_; }

private:
    void refill() {
        Philox4x32::Counter ctr{static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = Philox4x32::generate(ctr, key_);
        ++position_;
        index_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    Philox4x32::Counter buffer_{};
    int index_ = 4;
};

}  // namespace disaster
