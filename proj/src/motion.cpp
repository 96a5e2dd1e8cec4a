#include "tgvc/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgvc/hdbscan.hpp"

namespace tgvc {

TrajectoryFeature trajectory_features(const Trajectory& t) {
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < t.length(); ++f)
        if (t.vis[f]) visible.push_back(f);
    if (visible.size() < 2)
        throw DegenerateTrajectory("trajectory has fewer than 2 visible points");

    TrajectoryFeature feat;
    feat.x0 = t.xs[visible.front()];
    feat.y0 = t.ys[visible.front()];
    feat.dx = t.xs[visible.back()] - feat.x0;
    feat.dy = t.ys[visible.back()] - feat.y0;

    // Steps between consecutive visible points.
    std::vector<std::pair<double, double>> steps;
    for (std::size_t k = 0; k + 1 < visible.size(); ++k) {
        double sx = t.xs[visible[k + 1]] - t.xs[visible[k]];
        double sy = t.ys[visible[k + 1]] - t.ys[visible[k]];
        feat.d += std::sqrt(sx * sx + sy * sy);
        steps.emplace_back(sx, sy);
    }

    double angle_sum = 0;
    std::size_t angle_count = 0;
    constexpr double kMinStep = 1e-6;
    const std::pair<double, double>* prev = nullptr;
    for (const auto& s : steps) {
        double len = std::sqrt(s.first * s.first + s.second * s.second);
        if (len < kMinStep) continue;
        if (prev) {
            double dot = prev->first * s.first + prev->second * s.second;
            double cross = prev->first * s.second - prev->second * s.first;
            angle_sum += std::fabs(std::atan2(cross, dot));
            ++angle_count;
        }
        prev = &s;
    }
    feat.mean_dtheta = angle_count > 0 ? angle_sum / static_cast<double>(angle_count) : 0.0;
    return feat;
}

std::array<double, 6> default_feature_scales(std::uint32_t width, std::uint32_t height) {
    double diag = std::sqrt(static_cast<double>(width) * width +
                            static_cast<double>(height) * height);
    if (diag <= 0) diag = 1.0;
    return {diag, diag, diag, diag, diag, 3.14159265358979323846};
}

ClusterResult cluster_instances(const std::vector<TrajectoryFeature>& features,
                                const ClusterConfig& cfg, std::uint64_t /*seed*/) {
    cfg.validate();
    if (features.size() < static_cast<std::size_t>(cfg.min_cluster_size))
        throw InvalidInput("need at least min_cluster_size feature vectors");

    std::vector<double> flat;
    flat.reserve(features.size() * 6);
    for (const TrajectoryFeature& f : features) {
        auto v = f.vec();
        for (std::size_t k = 0; k < 6; ++k) flat.push_back(v[k] / cfg.feature_scales[k]);
    }

    ClusterResult out;
    out.labels = hdbscan_labels(flat.data(), features.size(), 6,
                                {cfg.min_cluster_size, cfg.min_samples});

    int n_clusters = 0;
    for (int l : out.labels) n_clusters = std::max(n_clusters, l + 1);
    out.instances.resize(static_cast<std::size_t>(n_clusters));
    for (int c = 0; c < n_clusters; ++c) out.instances[static_cast<std::size_t>(c)].id = c;
    for (std::size_t i = 0; i < out.labels.size(); ++i)
        if (out.labels[i] >= 0)
            out.instances[static_cast<std::size_t>(out.labels[i])].member_indices.push_back(i);
    return out;
}

bool Mask::empty_mask() const {
    return std::all_of(cells.begin(), cells.end(), [](std::uint8_t v) { return v == 0; });
}

std::vector<Mask> instance_masks(const MotionInstance& instance, const TrajectorySet& traj_set,
                                 int latent_w, int latent_h) {
    if (latent_w < 1 || latent_h < 1) throw InvalidInput("latent dimensions must be positive");
    const std::size_t L = traj_set.frame_count;
    std::vector<Mask> masks(L);
    for (Mask& m : masks) {
        m.width = latent_w;
        m.height = latent_h;
        m.cells.assign(static_cast<std::size_t>(latent_w) * latent_h, 0);
    }
    const double sx = traj_set.width > 0 ? static_cast<double>(latent_w) / traj_set.width : 1.0;
    const double sy = traj_set.height > 0 ? static_cast<double>(latent_h) / traj_set.height : 1.0;

    for (std::size_t idx : instance.member_indices) {
        if (idx >= traj_set.trajectories.size()) throw InvalidInput("member index out of range");
        const Trajectory& t = traj_set.trajectories[idx];
        for (std::size_t f = 0; f < L; ++f) {
            if (!t.vis[f]) continue;
            int cx = std::clamp(static_cast<int>(std::floor(t.xs[f] * sx)), 0, latent_w - 1);
            int cy = std::clamp(static_cast<int>(std::floor(t.ys[f] * sy)), 0, latent_h - 1);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int x = cx + dx, y = cy + dy;
                    if (x >= 0 && x < latent_w && y >= 0 && y < latent_h) masks[f].at(x, y) = 1;
                }
        }
    }
    return masks;
}

Frame occlude_region(const Frame& frame, const Mask& mask) {
    if (mask.width < 1 || mask.height < 1) throw InvalidInput("empty mask grid");
    const std::uint32_t W = frame.width, H = frame.height;

    // Upsample to pixel resolution.
    std::vector<std::uint8_t> px(static_cast<std::size_t>(W) * H, 0);
    bool any = false, all = true;
    for (std::uint32_t y = 0; y < H; ++y)
        for (std::uint32_t x = 0; x < W; ++x) {
            int cx = static_cast<int>(static_cast<std::uint64_t>(x) * mask.width / W);
            int cy = static_cast<int>(static_cast<std::uint64_t>(y) * mask.height / H);
            std::uint8_t m = mask.at(cx, cy);
            px[static_cast<std::size_t>(y) * W + x] = m;
            any |= m != 0;
            all &= m != 0;
        }
    if (!any) return frame;
    if (all) throw InvalidInput("mask covers the whole frame");

    // 2-pixel ring: Chebyshev dilation minus the mask, via two separable
    // max-filter passes.
    std::vector<std::uint8_t> dil = px;
    std::vector<std::uint8_t> tmp(px.size());
    for (std::uint32_t y = 0; y < H; ++y)
        for (std::uint32_t x = 0; x < W; ++x) {
            std::uint8_t m = 0;
            for (int dx = -2; dx <= 2; ++dx) {
                std::int64_t xx = static_cast<std::int64_t>(x) + dx;
                if (xx < 0 || xx >= static_cast<std::int64_t>(W)) continue;
                m |= dil[static_cast<std::size_t>(y) * W + static_cast<std::size_t>(xx)];
            }
            tmp[static_cast<std::size_t>(y) * W + x] = m;
        }
    for (std::uint32_t y = 0; y < H; ++y)
        for (std::uint32_t x = 0; x < W; ++x) {
            std::uint8_t m = 0;
            for (int dy = -2; dy <= 2; ++dy) {
                std::int64_t yy = static_cast<std::int64_t>(y) + dy;
                if (yy < 0 || yy >= static_cast<std::int64_t>(H)) continue;
                m |= tmp[static_cast<std::size_t>(yy) * W + x];
            }
            dil[static_cast<std::size_t>(y) * W + x] = m;
        }

    std::vector<double> ring_sum(frame.channels, 0.0);
    std::size_t ring_count = 0;
    for (std::uint32_t y = 0; y < H; ++y)
        for (std::uint32_t x = 0; x < W; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * W + x;
            if (dil[i] && !px[i]) {
                for (std::uint32_t c = 0; c < frame.channels; ++c)
                    ring_sum[c] += frame.at(x, y, c);
                ++ring_count;
            }
        }
    if (ring_count == 0) throw InvalidInput("mask has no surrounding ring");

    Frame out = frame;
    std::vector<std::uint8_t> fill(frame.channels);
    for (std::uint32_t c = 0; c < frame.channels; ++c)
        fill[c] = static_cast<std::uint8_t>(
            std::lround(ring_sum[c] / static_cast<double>(ring_count)));
    for (std::uint32_t y = 0; y < H; ++y)
        for (std::uint32_t x = 0; x < W; ++x)
            if (px[static_cast<std::size_t>(y) * W + x])
                for (std::uint32_t c = 0; c < frame.channels; ++c) out.at(x, y, c) = fill[c];
    return out;
}

double intra_score(const Clip& clip, const MotionInstance& instance,
                   const SimilarityProvider& provider) {
    const std::size_t L = clip.length();
    if (instance.masks.size() != L)
        throw InvalidInput("instance masks not computed for this clip");

    std::vector<Frame> occluded(L);
    for (std::size_t f = 0; f < L; ++f) {
        try {
            occluded[f] = occlude_region(clip.frames[f], instance.masks[f]);
        } catch (const InvalidInput&) {
            // A mask covering the whole frame has no surrounding ring to
            // sample; the occlusion degenerates to the identity, like the
            // empty-mask case.
            occluded[f] = clip.frames[f];
        }
    }

    double score = 0;
    for (std::size_t j = 0; j + 1 < L; ++j) {
        double d_orig = provider.score(clip.frames[j], clip.frames[j + 1]);
        double d_occl = provider.score(occluded[j], occluded[j + 1]);
        score += std::fabs(d_orig - d_occl);
    }
    return score;
}

double inter_score(double s_intra, const MotionInstance& instance, const TrajectorySet& traj_set,
                   TrajectoryLengthMode mode) {
    if (s_intra < 0) throw InvalidInput("s_intra must be >= 0");
    if (instance.member_indices.empty()) return 0.0;
    double sum = 0;
    for (std::size_t idx : instance.member_indices) {
        const Trajectory& t = traj_set.trajectories[idx];
        if (mode == TrajectoryLengthMode::path_length) {
            try {
                sum += trajectory_features(t).d;
            } catch (const DegenerateTrajectory&) {
                // A barely-visible member contributes zero spatial length.
            }
        } else {
            sum += static_cast<double>(std::count(t.vis.begin(), t.vis.end(), std::uint8_t{1}));
        }
    }
    return s_intra * (sum / static_cast<double>(instance.member_indices.size()));
}

std::vector<int> select_instances(const std::vector<double>& s_inter_by_id,
                                  const ScoringConfig& cfg) {
    cfg.validate();
    std::vector<int> ids;
    for (std::size_t i = 0; i < s_inter_by_id.size(); ++i)
        if (s_inter_by_id[i] > cfg.selection_threshold) ids.push_back(static_cast<int>(i));
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        double sa = s_inter_by_id[static_cast<std::size_t>(a)];
        double sb = s_inter_by_id[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return ids;
}

}  // namespace tgvc
