#pragma once

#include <string>
#include <vector>

#include "tgvc/frame.hpp"

namespace tgvc {

struct SimilarityConfig {
    int pool_grid = 8;   // mean-pooled grayscale grid, pool_grid x pool_grid
    int hist_bins = 32;  // per-channel histogram bins
};

/// Frame-pair similarity in [0, 1]. Implementations must be symmetric, score
/// a frame against itself as 1, and be callable from concurrent threads.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;

    virtual double score(const Frame& a, const Frame& b) const = 0;

    /// Index-aware hook for frames taken straight from the source video.
    /// Providers backed by precomputed per-frame embeddings override this;
    /// the default just scores content.
    virtual double score_indexed(const std::vector<Frame>& video, std::size_t i,
                                 std::size_t j) const {
        return score(video[i], video[j]);
    }
};

/// Default provider: pooled grayscale grid plus per-channel histogram,
/// concatenated and compared by cosine similarity.
class FeatureSimilarity final : public SimilarityProvider {
public:
    explicit FeatureSimilarity(SimilarityConfig cfg = {}) : cfg_(cfg) {}

    double score(const Frame& a, const Frame& b) const override;

    std::vector<double> features(const Frame& f) const;

private:
    SimilarityConfig cfg_;
};

/// Provider backed by one embedding vector per source-video frame (cosine
/// similarity). Content scoring falls back to the default features so the
/// provider stays total over arbitrary frames.
class EmbeddingSimilarity final : public SimilarityProvider {
public:
    explicit EmbeddingSimilarity(std::vector<std::vector<double>> embeddings,
                                 SimilarityConfig fallback_cfg = {});

    /// One line per frame, whitespace-separated decimal floats, fixed dimension.
    static EmbeddingSimilarity load(const std::string& path);

    double score(const Frame& a, const Frame& b) const override { return fallback_.score(a, b); }
    double score_indexed(const std::vector<Frame>& video, std::size_t i,
                         std::size_t j) const override;

    std::size_t frame_count() const { return embeddings_.size(); }

private:
    std::vector<std::vector<double>> embeddings_;  // unit-normalized on load
    FeatureSimilarity fallback_;
};

/// Dimension-checked provider call.
double frame_similarity(const SimilarityProvider& provider, const Frame& a, const Frame& b);

}  // namespace tgvc
