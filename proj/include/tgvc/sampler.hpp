#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tgvc/motion.hpp"
#include "tgvc/tracker.hpp"

namespace tgvc {

struct BudgetConfig {
    double alpha = 0.5;
    double beta = 0.5;
    int k_max = 15;
    double score_norm = 1.0;  // divisor mapping S_inter into [0, 1]

    void validate() const {
        if (alpha < 0 || beta < 0) throw InvalidInput("alpha and beta must be >= 0");
        if (k_max < 1) throw InvalidInput("k_max must be >= 1");
    }
};

/// K = min(round((alpha * s_hat + beta * n_i / n_total) * k_max), k_max),
/// with s_hat = min(s_inter / score_norm, 1), clamped to at least 1.
int keypoint_budget(double s_inter, std::size_t n_i, std::size_t n_total,
                    const BudgetConfig& cfg);

/// k-means++ over feature vectors (fixed seed, at most 100 Lloyd iterations,
/// tolerance 1e-6 on center movement); emits the index of the member nearest
/// each converged center, so the result is always a subset of the input.
/// k > n clamps to n. Returned indices are ascending.
std::vector<std::size_t> kmeans_sample(const std::vector<std::array<double, 6>>& features,
                                       int k, std::uint64_t seed);

/// Uniform sample of k distinct indices from [0, n); baseline sampling mode.
std::vector<std::size_t> random_sample(std::size_t n, int k, std::uint64_t seed);

/// Quantized trajectory point in latent cells.
struct SparsePoint {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    bool operator==(const SparsePoint&) const = default;
};

struct SparseTrajectory {
    std::vector<SparsePoint> points;   // length L
    std::vector<std::uint8_t> vis;     // length L
    bool operator==(const SparseTrajectory&) const = default;
};

struct SparseInstance {
    std::vector<SparseTrajectory> trajectories;
    bool operator==(const SparseInstance&) const = default;
};

/// The transmitted motion payload: per selected instance, its representative
/// trajectories quantized to latent cells.
struct SparseTrajectorySet {
    std::uint16_t latent_w = 0;
    std::uint16_t latent_h = 0;
    std::uint16_t frame_count = 0;
    std::vector<SparseInstance> instances;

    bool operator==(const SparseTrajectorySet&) const = default;

    std::size_t trajectory_count() const {
        std::size_t n = 0;
        for (const auto& inst : instances) n += inst.trajectories.size();
        return n;
    }
};

/// floor(x / factor) clamped to [0, latent_dim).
std::uint16_t quantize_coord(double v, int factor, int latent_dim);

/// Quantizes pixel-space trajectories (grouped per instance) to latent cells;
/// latent_w = ceil(width / factor), latent_h = ceil(height / factor).
SparseTrajectorySet quantize_trajectories(
    const std::vector<std::vector<const Trajectory*>>& per_instance, std::uint32_t width,
    std::uint32_t height, int factor = 8);

}  // namespace tgvc
