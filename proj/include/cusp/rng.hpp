#pragma once

#include <array>
#include <cstdint>

namespace cusp {

// Deterministic, bit-portable random stream (xoshiro256++ seeded through
// splitmix64). The same seed yields the same draw sequence on every platform
// for the same build.
//
// split(index) returns a child stream displaced by (index+1) long jumps of
// 2^192 states, so children with distinct indices (and the parent's first
// 2^192 draws) can never overlap. Contract: only derive streams from one root
// stream with distinct indices; do not split a split.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t next_u64();
    // Uniform on [0,1) with 53 random bits.
    double next_double();
    // Uniform on the open interval (0,1); safe to pass to log().
    double next_open();

    RngStream split(std::uint64_t index) const;

private:
    std::array<std::uint64_t, 4> state_;
    void long_jump();
};

}  // namespace cusp
