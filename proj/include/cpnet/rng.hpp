#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace cpnet::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
inline Counter philox4x32(Counter ctr, Key key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// Stream domains keep independent consumers of the same (path, agent) apart.
enum class Domain : std::uint32_t {
    Driver = 1,
    FirstPassage = 2,
    BridgeUniform = 3,
};

/// Sequential random stream addressed by (seed, path, agent, domain). Draw k of a
/// stream depends only on that address and k, so any scheduling of paths over
/// workers reproduces identical numbers.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t path, std::uint32_t agent, Domain domain = Domain::Driver)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          tag_((static_cast<std::uint32_t>(path >> 32) & 0xFFFFu) | (static_cast<std::uint32_t>(domain) << 16)),
          agent_(agent) {}

    /// Uniform on the open interval (0,1), 53-bit resolution.
    double uniform() {
        if (buffered_ == 0) refill();
        const std::uint64_t bits = buffer_[2 - buffered_--];
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; both variates of a pair are used.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
    void refill() {
        // Counter layout: {block, agent, path low word, path high bits | domain}.
        // A stream holds 2^32 blocks (2^33 uniforms), far beyond any simulation here.
        const Counter out = philox4x32({static_cast<std::uint32_t>(block_), agent_, path_lo_, tag_}, key_);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        buffered_ = 2;
        ++block_;
    }

    Key key_;
    std::uint32_t path_lo_;
    std::uint32_t tag_;
    std::uint32_t agent_;
    std::uint64_t block_ = 0;
    std::uint64_t buffer_[2] = {0, 0};
    int buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cpnet::rng
