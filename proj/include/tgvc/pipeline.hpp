#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgvc/bitstream.hpp"
#include "tgvc/motion.hpp"
#include "tgvc/sampler.hpp"
#include "tgvc/segmentation.hpp"
#include "tgvc/tracker.hpp"

namespace tgvc {

enum class SamplingMode { sparse, random, dense };

/// Every tunable of the encoder in one flat bag. Serialized as key=value
/// lines; the canonical form feeds the manifest digest.
struct PipelineConfig {
    // segmentation
    double cut_threshold = 0.5;
    int max_clip_len = 30;
    int target_clip_len = 16;
    // similarity
    int pool_grid = 8;
    int hist_bins = 32;
    // tracker
    int grid_size = 64;
    int block_radius = 3;
    int search_radius = 4;
    double visibility_threshold = 20.0;
    // clustering / scoring
    int min_cluster_size = 16;
    int min_samples = 8;
    double selection_threshold = 0.0;
    TrajectoryLengthMode length_mode = TrajectoryLengthMode::path_length;
    // budget / sampling
    double alpha = 0.5;
    double beta = 0.5;
    int kmax = 15;
    double score_norm = 0.0;  // 0 = normalize by the clip's max selected score
    SamplingMode sampling = SamplingMode::sparse;
    int quant_factor = 8;
    // guidance / simulator
    double scale_coeff = 30.0;
    std::string weight_mode = "linear";
    int steps = 10;
    std::uint64_t seed = 0;

    static PipelineConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string canonical() const;
    std::uint64_t digest() const;

    SegmentationConfig segmentation() const;
    SimilarityConfig similarity() const;
    TrackerConfig tracker() const;
    ClusterConfig cluster(std::uint32_t width, std::uint32_t height) const;
    BudgetConfig budget(double norm) const;
};

struct InstanceReport {
    int id = 0;
    std::size_t members = 0;
    double s_intra = 0;
    double s_inter = 0;
    bool selected = false;
    int k = 0;  // transmitted trajectories; 0 when not selected
};

struct ClipResult {
    std::size_t index = 0;
    std::size_t first_frame = 0;
    std::size_t last_frame = 0;
    std::vector<std::uint8_t> stream;
    SparseTrajectorySet sparse;
    std::vector<InstanceReport> instances;
};

struct EncodeResult {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 0;
    std::size_t total_frames = 0;
    std::vector<std::size_t> keyframes;
    std::vector<ClipResult> clips;
    std::uint64_t config_digest = 0;
};

/// Full encoder path: keyframes, clips, tracking, clustering, scoring,
/// sampling, quantization and bitstream packing. Clips run concurrently when
/// jobs > 1; results are independent of the schedule.
EncodeResult encode_video(const std::vector<Frame>& video, const PipelineConfig& cfg,
                          int jobs = 1, const std::string& embeddings_path = "");

ClipResult process_clip(const Clip& clip, const PipelineConfig& cfg, std::uint64_t clip_seed,
                        const SimilarityProvider& provider);

std::string manifest_json(const EncodeResult& result,
                          const std::vector<std::string>& stream_files);

}  // namespace tgvc
