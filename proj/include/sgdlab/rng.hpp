#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sgdlab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every draw is a pure function of (seed, stream, step, sub-draw index), so a
// trajectory produces identical noise no matter how work is scheduled across
// threads, and two experiments sharing (seed, stream) see common random
// numbers by construction.
namespace philox {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;

inline Block round10(Block ctr, std::uint32_t k0, std::uint32_t k1)
{
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

} // namespace philox

// All randomness consumed while advancing one chain step (or one SDE step,
// or one initial draw). Streams are limited to 48 bits and step indices to
// 48 bits so that (sub, step, stream) packs into the 128-bit counter.
class StepRng {
public:
    StepRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step)
        : k0_(static_cast<std::uint32_t>(seed))
        , k1_(static_cast<std::uint32_t>(seed >> 32))
        , step_(step)
        , stream_(stream)
    {
    }

    std::uint32_t u32()
    {
        if (have_ == 0) refill();
        return buf_[4 - have_--];
    }

    // Uniform on (0,1).
    double uniform01() { return (static_cast<double>(u32()) + 0.5) * 0x1p-32; }

    double gaussian()
    {
        const double u1 = (static_cast<double>(u32()) + 1.0) * 0x1p-32; // (0,1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    int rademacher() { return (u32() & 1u) ? 1 : -1; }

    // Unbiased integer in [0, n) by rejection.
    std::uint32_t below(std::uint32_t n)
    {
        const std::uint32_t limit = (0xFFFFFFFFu / n) * n;
        std::uint32_t x = u32();
        while (x >= limit) x = u32();
        return x % n;
    }

private:
    void refill()
    {
        philox::Block ctr = {
            sub_,
            static_cast<std::uint32_t>(step_),
            static_cast<std::uint32_t>((step_ >> 32) & 0xFFFFu) |
                static_cast<std::uint32_t>((stream_ & 0xFFFFu) << 16),
            static_cast<std::uint32_t>(stream_ >> 16),
        };
        buf_ = philox::round10(ctr, k0_, k1_);
        ++sub_;
        have_ = 4;
    }

    std::uint32_t k0_, k1_;
    std::uint64_t step_, stream_;
    std::uint32_t sub_ = 0;
    philox::Block buf_{};
    int have_ = 0;
};

// Reserved step index for drawing the initial condition of a trajectory.
inline constexpr std::uint64_t kInitialDrawStep = 0xFFFFFFFFFFFFull;

} // namespace sgdlab
