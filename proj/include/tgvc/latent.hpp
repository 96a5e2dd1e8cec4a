#pragma once

#include <cstdint>
#include <vector>

#include "tgvc/errors.hpp"

namespace tgvc {

/// A sequence of real-valued latent frames, frame-major, row-major,
/// channel-interleaved.
struct LatentSequence {
    int frames = 0;
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    static LatentSequence zeros(int frames, int height, int width, int channels) {
        LatentSequence z;
        z.frames = frames;
        z.height = height;
        z.width = width;
        z.channels = channels;
        z.data.assign(static_cast<std::size_t>(frames) * height * width * channels, 0.0);
        return z;
    }

    std::size_t frame_size() const {
        return static_cast<std::size_t>(height) * width * channels;
    }

    double* frame(int f) { return data.data() + static_cast<std::size_t>(f) * frame_size(); }
    const double* frame(int f) const {
        return data.data() + static_cast<std::size_t>(f) * frame_size();
    }

    double& at(int f, int y, int x, int c) {
        return data[(static_cast<std::size_t>(f) * height * width +
                     static_cast<std::size_t>(y) * width + x) *
                        channels +
                    c];
    }
    double at(int f, int y, int x, int c) const {
        return data[(static_cast<std::size_t>(f) * height * width +
                     static_cast<std::size_t>(y) * width + x) *
                        channels +
                    c];
    }

    bool same_shape(const LatentSequence& o) const {
        return frames == o.frames && height == o.height && width == o.width &&
               channels == o.channels;
    }

    void require_shape(const LatentSequence& o, const char* what) const {
        if (!same_shape(o)) throw InvalidInput(std::string(what) + ": latent shape mismatch");
    }
};

}  // namespace tgvc
