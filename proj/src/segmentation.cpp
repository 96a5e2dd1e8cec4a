#include "tgvc/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tgvc {

std::vector<std::size_t> select_keyframes(const std::vector<Frame>& video,
                                          const SimilarityProvider& provider,
                                          const SegmentationConfig& cfg) {
    cfg.validate();
    const std::size_t n = video.size();
    if (n < 2) throw InvalidInput("video needs at least 2 frames");

    std::set<std::size_t> picked{0, n - 1};

    // Provisional segments: disjoint chunks of target_clip_len frames. Within
    // each, the interior frame least similar on average to the rest of the
    // segment is marked.
    const std::size_t target = static_cast<std::size_t>(cfg.target_clip_len);
    for (std::size_t s = 0; s < n; s += target) {
        std::size_t e = std::min(s + target - 1, n - 1);
        if (e - s + 1 < 3) continue;
        std::size_t best = 0;
        double best_mean = 2.0;
        for (std::size_t i = s + 1; i < e; ++i) {
            double sum = 0.0;
            for (std::size_t j = s; j <= e; ++j) {
                if (j == i) continue;
                sum += provider.score_indexed(video, i, j);
            }
            double mean = sum / static_cast<double>(e - s);
            if (mean < best_mean) {
                best_mean = mean;
                best = i;
            }
        }
        picked.insert(best);
    }

    // Scene cuts: an adjacent pair below the threshold makes both keyframes.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (provider.score_indexed(video, i, i + 1) < cfg.cut_threshold) {
            picked.insert(i);
            picked.insert(i + 1);
        }
    }

    // Split any gap that would produce a clip longer than max_clip_len.
    std::vector<std::size_t> out(picked.begin(), picked.end());
    const std::size_t max_gap = static_cast<std::size_t>(cfg.max_clip_len) - 1;
    std::vector<std::size_t> result;
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        std::size_t a = out[k];
        std::size_t b = out[k + 1];
        result.push_back(a);
        std::size_t gap = b - a;
        if (gap > max_gap) {
            std::size_t parts = (gap + max_gap - 1) / max_gap;
            for (std::size_t p = 1; p < parts; ++p)
                result.push_back(a + (gap * p + parts / 2) / parts);
        }
    }
    result.push_back(out.back());
    return result;
}

std::vector<Clip> segment_into_clips(const std::vector<Frame>& video,
                                     const std::vector<std::size_t>& keyframes,
                                     int max_clip_len) {
    if (video.size() < 2) throw InvalidInput("video needs at least 2 frames");
    if (keyframes.size() < 2 || keyframes.front() != 0 || keyframes.back() != video.size() - 1)
        throw InvalidInput("keyframes must include the first and last frame");
    for (std::size_t k = 0; k + 1 < keyframes.size(); ++k)
        if (keyframes[k] >= keyframes[k + 1])
            throw InvalidInput("keyframe indices must be strictly increasing");
    if (keyframes.back() >= video.size()) throw InvalidInput("keyframe index out of range");

    std::vector<Clip> clips;
    for (std::size_t k = 0; k + 1 < keyframes.size(); ++k) {
        std::size_t a = keyframes[k];
        std::size_t b = keyframes[k + 1];
        std::size_t len = b - a + 1;
        if (len > static_cast<std::size_t>(max_clip_len))
            throw SpanTooLong("clip span " + std::to_string(len) + " exceeds max_clip_len " +
                              std::to_string(max_clip_len) +
                              "; insert an extra keyframe");
        Clip c;
        c.frames.assign(video.begin() + static_cast<std::ptrdiff_t>(a),
                        video.begin() + static_cast<std::ptrdiff_t>(b + 1));
        clips.push_back(std::move(c));
    }
    return clips;
}

}  // namespace tgvc
