#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tgvc/frame.hpp"
#include "tgvc/similarity.hpp"
#include "tgvc/tracker.hpp"

namespace tgvc {

/// Spatio-temporal description of one trajectory, computed on the visible
/// sub-trajectory only.
struct TrajectoryFeature {
    double x0 = 0;
    double y0 = 0;
    double dx = 0;
    double dy = 0;
    double d = 0;            // total path length over visible steps
    double mean_dtheta = 0;  // mean absolute turn angle between steps, [0, pi]

    std::array<double, 6> vec() const { return {x0, y0, dx, dy, d, mean_dtheta}; }
};

TrajectoryFeature trajectory_features(const Trajectory& t);

/// Binary mask at latent resolution.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;  // height * width

    std::uint8_t at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return cells[static_cast<std::size_t>(y) * width + x]; }
    bool empty_mask() const;
};

struct MotionInstance {
    int id = 0;
    std::vector<std::size_t> member_indices;  // into the fused TrajectorySet
    std::vector<Mask> masks;                  // one per frame, filled on demand

    std::size_t size() const { return member_indices.size(); }
};

struct ClusterConfig {
    int min_cluster_size = 16;
    int min_samples = 8;
    std::array<double, 6> feature_scales{1, 1, 1, 1, 1, 1};

    void validate() const {
        if (min_cluster_size < 2) throw InvalidInput("min_cluster_size must be >= 2");
        for (double s : feature_scales)
            if (!(s > 0)) throw InvalidInput("feature_scales must be positive");
    }
};

/// Positions and displacement-like dimensions divided by the frame diagonal,
/// turn angle by pi, so the cluster metric sees comparable scales.
std::array<double, 6> default_feature_scales(std::uint32_t width, std::uint32_t height);

struct ClusterResult {
    std::vector<int> labels;  // -1 = noise, aligned with the feature list
    std::vector<MotionInstance> instances;
};

/// HDBSCAN over scaled feature vectors. Deterministic for a fixed input order;
/// the seed is accepted for interface symmetry with the samplers but the
/// clustering itself has no random component.
ClusterResult cluster_instances(const std::vector<TrajectoryFeature>& features,
                                const ClusterConfig& cfg, std::uint64_t seed = 0);

/// Per-frame masks: every latent cell holding a visible member point, dilated
/// by one cell.
std::vector<Mask> instance_masks(const MotionInstance& instance, const TrajectorySet& traj_set,
                                 int latent_w, int latent_h);

/// Replaces the masked region (mask upsampled to pixel resolution) with the
/// mean color of a 2-pixel-wide ring around it.
Frame occlude_region(const Frame& frame, const Mask& mask);

/// Sum over adjacent frame pairs of |D(F_j, F_j+1) - D(P(F_j), P(F_j+1))|,
/// where P occludes the instance's per-frame mask.
double intra_score(const Clip& clip, const MotionInstance& instance,
                   const SimilarityProvider& provider);

enum class TrajectoryLengthMode { path_length, visible_frames };

/// S_inter = S_intra * mean trajectory length of the instance's members.
double inter_score(double s_intra, const MotionInstance& instance, const TrajectorySet& traj_set,
                   TrajectoryLengthMode mode = TrajectoryLengthMode::path_length);

struct ScoringConfig {
    double selection_threshold = 0.0;

    void validate() const {
        if (selection_threshold < 0) throw InvalidInput("selection_threshold must be >= 0");
    }
};

/// Instance ids with S_inter strictly above the threshold, sorted by
/// descending score, ties to the lower id.
std::vector<int> select_instances(const std::vector<double>& s_inter_by_id,
                                  const ScoringConfig& cfg);

}  // namespace tgvc
