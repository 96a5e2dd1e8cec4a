#pragma once

#include <cstdint>
#include <vector>

#include "tgvc/sampler.hpp"

namespace tgvc {

// Wire format, all multi-byte integers little-endian:
//   magic "TGVC" (4 bytes), version u8 = 1, L u16, latent_w u16, latent_h u16,
//   n_instances u16; then per instance: K u16; per trajectory: x0 and y0 as
//   unsigned varints, visibility as ceil(L/8) bytes LSB-first, then L-1
//   (dx, dy) pairs, each zigzag-mapped and varint-coded.
//
// Varints are base-128, little-endian groups, high bit = continuation.
// Zigzag is z = (n << 1) XOR (n >> 31) in 32-bit two's-complement arithmetic.

std::vector<std::uint8_t> encode(const SparseTrajectorySet& set);

SparseTrajectorySet decode(const std::vector<std::uint8_t>& bytes);

struct RateReport {
    std::uint64_t motion_bits = 0;
    std::uint64_t keyframe_bits = 0;
    double bpp_with_motion = 0;
    double bpp_without_motion = 0;
};

RateReport rate_report(std::size_t stream_bytes, std::uint32_t width, std::uint32_t height,
                       std::uint32_t frames, std::uint64_t keyframe_bits);

// Building blocks, exposed for tests.
void put_varint(std::vector<std::uint8_t>& out, std::uint32_t v);
std::uint32_t zigzag32(std::int32_t n);
std::int32_t unzigzag32(std::uint32_t z);

}  // namespace tgvc
