#include "tgvc/frame.hpp"

#include <cstdio>
#include <memory>

namespace tgvc {

Frame make_frame(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                 std::uint8_t fill) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return f;
}

namespace {
struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

std::vector<Frame> load_raw_video(const std::string& path, std::uint32_t width,
                                  std::uint32_t height, std::uint32_t channels) {
    if (width < 8 || height < 8 || (channels != 1 && channels != 3))
        throw InvalidInput("invalid raw video dimensions");
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw InvalidInput("cannot open raw video file: " + path);

    const std::size_t frame_bytes = static_cast<std::size_t>(width) * height * channels;
    std::vector<Frame> video;
    for (;;) {
        Frame fr = make_frame(width, height, channels);
        std::size_t got = std::fread(fr.data.data(), 1, frame_bytes, f.get());
        if (got == 0) break;
        if (got != frame_bytes)
            throw InvalidInput("raw video file size is not a multiple of the frame size");
        video.push_back(std::move(fr));
    }
    if (video.size() < 2) throw InvalidInput("raw video needs at least 2 frames");
    return video;
}

void save_raw_video(const std::string& path, const std::vector<Frame>& video) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw InvalidInput("cannot open output file: " + path);
    for (const Frame& fr : video)
        if (std::fwrite(fr.data.data(), 1, fr.data.size(), f.get()) != fr.data.size())
            throw InvalidInput("short write to " + path);
}

}  // namespace tgvc
