#include "tgvc/bitstream.hpp"

#include <cstring>

namespace tgvc {

namespace {

constexpr char kMagic[4] = {'T', 'G', 'V', 'C'};
constexpr std::uint8_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                                     (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t varint() {
        std::uint32_t v = 0;
        int shift = 0;
        for (;;) {
            std::uint8_t b = u8();
            if (shift >= 28 && (b & 0x7F) > 0x0F)
                throw CorruptStream("varint exceeds 32 bits");
            v |= static_cast<std::uint32_t>(b & 0x7F) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
            if (shift > 28) throw CorruptStream("varint too long");
        }
    }
    const std::uint8_t* raw(std::size_t n) {
        need(n);
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw TruncationError("stream ends early", pos_);
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void put_varint(std::vector<std::uint8_t>& out, std::uint32_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t zigzag32(std::int32_t n) {
    return (static_cast<std::uint32_t>(n) << 1) ^ static_cast<std::uint32_t>(n >> 31);
}

std::int32_t unzigzag32(std::uint32_t z) {
    return static_cast<std::int32_t>(z >> 1) ^ -static_cast<std::int32_t>(z & 1);
}

std::vector<std::uint8_t> encode(const SparseTrajectorySet& set) {
    if (set.frame_count < 1) throw InvalidInput("sparse set needs at least one frame");
    if (set.instances.size() > 0xFFFF) throw EncodeRangeError("too many instances for u16");
    const std::size_t L = set.frame_count;

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    put_u16(out, set.frame_count);
    put_u16(out, set.latent_w);
    put_u16(out, set.latent_h);
    put_u16(out, static_cast<std::uint16_t>(set.instances.size()));

    for (const SparseInstance& inst : set.instances) {
        if (inst.trajectories.size() > 0xFFFF)
            throw EncodeRangeError("too many trajectories for u16");
        put_u16(out, static_cast<std::uint16_t>(inst.trajectories.size()));
        for (const SparseTrajectory& t : inst.trajectories) {
            if (t.points.size() != L || t.vis.size() != L)
                throw InvalidInput("trajectory length does not match frame count");
            for (const SparsePoint& p : t.points)
                if (p.x >= set.latent_w || p.y >= set.latent_h)
                    throw EncodeRangeError("coordinate outside the latent grid");

            put_varint(out, t.points[0].x);
            put_varint(out, t.points[0].y);
            std::size_t vis_bytes = (L + 7) / 8;
            std::size_t base = out.size();
            out.insert(out.end(), vis_bytes, 0);
            for (std::size_t f = 0; f < L; ++f)
                if (t.vis[f]) out[base + f / 8] |= static_cast<std::uint8_t>(1u << (f % 8));
            for (std::size_t f = 0; f + 1 < L; ++f) {
                std::int32_t dx = static_cast<std::int32_t>(t.points[f + 1].x) -
                                  static_cast<std::int32_t>(t.points[f].x);
                std::int32_t dy = static_cast<std::int32_t>(t.points[f + 1].y) -
                                  static_cast<std::int32_t>(t.points[f].y);
                put_varint(out, zigzag32(dx));
                put_varint(out, zigzag32(dy));
            }
        }
    }
    return out;
}

SparseTrajectorySet decode(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    const std::uint8_t* magic = r.raw(4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic");
    if (r.u8() != kVersion) throw FormatError("unsupported version");

    SparseTrajectorySet set;
    set.frame_count = r.u16();
    set.latent_w = r.u16();
    set.latent_h = r.u16();
    if (set.frame_count < 1) throw CorruptStream("frame count must be >= 1");
    std::uint16_t n_instances = r.u16();
    const std::size_t L = set.frame_count;

    for (std::uint16_t i = 0; i < n_instances; ++i) {
        SparseInstance inst;
        std::uint16_t k = r.u16();
        for (std::uint16_t j = 0; j < k; ++j) {
            SparseTrajectory t;
            std::uint32_t x = r.varint();
            std::uint32_t y = r.varint();
            std::size_t vis_bytes = (L + 7) / 8;
            const std::uint8_t* vis = r.raw(vis_bytes);
            t.vis.resize(L);
            for (std::size_t f = 0; f < L; ++f)
                t.vis[f] = (vis[f / 8] >> (f % 8)) & 1;

            auto check = [&](std::uint32_t cx, std::uint32_t cy) {
                if (cx >= set.latent_w || cy >= set.latent_h)
                    throw CorruptStream("decoded coordinate outside the latent grid");
            };
            check(x, y);
            t.points.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y)});
            std::int64_t cx = x, cy = y;
            for (std::size_t f = 0; f + 1 < L; ++f) {
                cx += unzigzag32(r.varint());
                cy += unzigzag32(r.varint());
                if (cx < 0 || cy < 0)
                    throw CorruptStream("decoded coordinate outside the latent grid");
                check(static_cast<std::uint32_t>(cx), static_cast<std::uint32_t>(cy));
                t.points.push_back(
                    {static_cast<std::uint16_t>(cx), static_cast<std::uint16_t>(cy)});
            }
            inst.trajectories.push_back(std::move(t));
        }
        set.instances.push_back(std::move(inst));
    }
    if (!r.done()) throw FormatError("trailing bytes after the stream");
    return set;
}

RateReport rate_report(std::size_t stream_bytes, std::uint32_t width, std::uint32_t height,
                       std::uint32_t frames, std::uint64_t keyframe_bits) {
    if (width == 0 || height == 0 || frames == 0)
        throw InvalidInput("dimensions must be positive");
    RateReport rep;
    rep.motion_bits = static_cast<std::uint64_t>(stream_bytes) * 8;
    rep.keyframe_bits = keyframe_bits;
    double pixels = static_cast<double>(width) * height * frames;
    rep.bpp_with_motion = static_cast<double>(rep.motion_bits + keyframe_bits) / pixels;
    rep.bpp_without_motion = static_cast<double>(keyframe_bits) / pixels;
    return rep;
}

}  // namespace tgvc
