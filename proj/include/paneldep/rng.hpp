#pragma once

// Counter-based Philox4x32-10 generator. A stream is addressed by
// (seed, replication, role), so any replication can be regenerated
// without touching the others and results do not depend on the order
// in which replications are executed.

#include <array>
#include <cstdint>
#include <limits>

namespace paneldep {

/// Philox4x32 with 10 rounds: a bijection over a 128-bit counter with a
/// 64-bit key.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                   std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// Named sub-streams of one replication.
enum class StreamRole : std::uint32_t {
    Regressors = 1,
    Errors = 2,
    Factor = 3,
    FixedEffects = 4,
    Slopes = 5,
};

/// UniformRandomBitGenerator over one Philox stream; yields 64-bit words.
/// Counter layout: {block lo, block hi, replication, role}.
class PhiloxStream {
  public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint32_t replication, StreamRole role)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          replication_(replication), role_(static_cast<std::uint32_t>(role)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (lane_ == 2) refill();
        const result_type v = (static_cast<result_type>(buffer_[2 * lane_]) << 32) | buffer_[2 * lane_ + 1];
        ++lane_;
        return v;
    }

    /// Number of 128-bit blocks consumed so far.
    std::uint64_t blocks() const { return block_; }

  private:
    void refill() {
        buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 replication_, role_},
                                key_);
        ++block_;
        lane_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t replication_;
    std::uint32_t role_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int lane_ = 2;
};

} // namespace paneldep
