#pragma once

#include <vector>

#include "tgvc/frame.hpp"
#include "tgvc/similarity.hpp"

namespace tgvc {

struct SegmentationConfig {
    double cut_threshold = 0.5;
    int max_clip_len = 30;
    int target_clip_len = 16;

    void validate() const {
        if (cut_threshold < 0.0 || cut_threshold > 1.0)
            throw InvalidInput("cut_threshold must be in [0, 1]");
        if (target_clip_len < 2 || target_clip_len > max_clip_len || max_clip_len > 30)
            throw InvalidInput("need 2 <= target_clip_len <= max_clip_len <= 30");
    }
};

/// Keyframe indices for a video, strictly increasing, always containing the
/// first and last frame. Within each provisional segment the frame whose mean
/// similarity to the segment's other frames is smallest is marked (ties to the
/// lowest index); whenever two consecutive frames score below cut_threshold,
/// both become keyframes. Gaps longer than max_clip_len are split evenly.
std::vector<std::size_t> select_keyframes(const std::vector<Frame>& video,
                                          const SimilarityProvider& provider,
                                          const SegmentationConfig& cfg);

/// Splits the video into clips spanning [idx_k, idx_{k+1}] inclusive; adjacent
/// clips share one boundary frame. Throws SpanTooLong if any span exceeds
/// max_clip_len frames.
std::vector<Clip> segment_into_clips(const std::vector<Frame>& video,
                                     const std::vector<std::size_t>& keyframes,
                                     int max_clip_len = 30);

}  // namespace tgvc
