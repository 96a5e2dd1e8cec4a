#pragma once

// Synthetic inputs shared across the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tgvc/frame.hpp"
#include "tgvc/rng.hpp"

namespace tgvc::testutil {

/// Smooth horizontal gradient with a diagonal ramp.
inline Frame gradient_frame(std::uint32_t w, std::uint32_t h) {
    Frame f = make_frame(w, h, 1);
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x)
            f.at(x, y) = static_cast<std::uint8_t>((x * 200) / w + (y * 55) / h);
    return f;
}

/// Random texture canvas used for exact-translation clips.
inline Frame noise_canvas(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    Frame f = make_frame(w, h, 1);
    Rng rng(seed);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
    return f;
}

/// Crop a w x h window at (ox, oy) from a larger canvas.
inline Frame crop(const Frame& canvas, std::uint32_t ox, std::uint32_t oy, std::uint32_t w,
                  std::uint32_t h) {
    Frame f = make_frame(w, h, canvas.channels);
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x)
            for (std::uint32_t c = 0; c < canvas.channels; ++c)
                f.at(x, y, c) = canvas.at(ox + x, oy + y, c);
    return f;
}

/// L frames of a noise texture translating right by `step` px per frame.
inline std::vector<Frame> shift_video(std::uint32_t w, std::uint32_t h, std::size_t L, int step,
                                      std::uint64_t seed = 7) {
    Frame canvas = noise_canvas(w + static_cast<std::uint32_t>(L) * std::abs(step) + 8, h, seed);
    std::vector<Frame> video;
    std::uint32_t base = static_cast<std::uint32_t>(L) * std::abs(step);
    for (std::size_t t = 0; t < L; ++t) {
        std::int64_t ox = static_cast<std::int64_t>(base) -
                          static_cast<std::int64_t>(t) * step;
        video.push_back(crop(canvas, static_cast<std::uint32_t>(ox), 0, w, h));
    }
    return video;
}

inline void draw_disc(Frame& f, double cx, double cy, double r, std::uint8_t value) {
    for (std::uint32_t y = 0; y < f.height; ++y)
        for (std::uint32_t x = 0; x < f.width; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                for (std::uint32_t c = 0; c < f.channels; ++c) f.at(x, y, c) = value;
}

/// Background 30, one bright disc moving right by `step` px per frame.
inline std::vector<Frame> blob_video(std::uint32_t w, std::uint32_t h, std::size_t L,
                                     double start_x, double y, double r, int step) {
    std::vector<Frame> video;
    for (std::size_t t = 0; t < L; ++t) {
        Frame f = make_frame(w, h, 1, 30);
        draw_disc(f, start_x + static_cast<double>(t) * step, y, r, 220);
        video.push_back(std::move(f));
    }
    return video;
}

inline std::vector<Frame> constant_video(std::uint32_t w, std::uint32_t h, std::size_t L,
                                         std::uint8_t value = 128) {
    std::vector<Frame> v;
    for (std::size_t i = 0; i < L; ++i) v.push_back(make_frame(w, h, 1, value));
    return v;
}

}  // namespace tgvc::testutil
