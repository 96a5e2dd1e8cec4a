#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgvc/errors.hpp"

namespace tgvc {

/// One 8-bit video frame, row-major, interleaved channels.
struct Frame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 1;
    std::vector<std::uint8_t> data;

    std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    /// Border-clamped sample; used by the block matcher near frame edges.
    std::uint8_t at_clamped(std::int64_t x, std::int64_t y, std::uint32_t c = 0) const {
        if (x < 0) x = 0;
        if (y < 0) y = 0;
        if (x >= static_cast<std::int64_t>(width)) x = width - 1;
        if (y >= static_cast<std::int64_t>(height)) y = height - 1;
        return at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), c);
    }

    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    void validate() const {
        if (width < 8 || height < 8)
            throw InvalidInput("frame dimensions must be at least 8x8");
        if (channels != 1 && channels != 3)
            throw InvalidInput("frame must have 1 or 3 channels");
        if (data.size() != static_cast<std::size_t>(width) * height * channels)
            throw InvalidInput("frame data length does not match dimensions");
    }
};

Frame make_frame(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                 std::uint8_t fill = 0);

/// A keyframe-delimited run of frames. First and last frames are the clip's
/// keyframe pair.
struct Clip {
    std::vector<Frame> frames;

    std::size_t length() const { return frames.size(); }

    void validate() const {
        if (frames.size() < 2) throw InvalidInput("clip needs at least 2 frames");
        frames.front().validate();
        for (const Frame& f : frames)
            if (!f.same_shape(frames.front()))
                throw InvalidInput("clip frames must share dimensions");
    }

    Clip reversed() const {
        Clip r;
        r.frames.assign(frames.rbegin(), frames.rend());
        return r;
    }
};

/// Reads a headerless file of L frames, each height*width*channels bytes.
std::vector<Frame> load_raw_video(const std::string& path, std::uint32_t width,
                                  std::uint32_t height, std::uint32_t channels);

void save_raw_video(const std::string& path, const std::vector<Frame>& video);

}  // namespace tgvc
