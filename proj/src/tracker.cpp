#include "tgvc/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tgvc/kernels.hpp"

namespace tgvc {

std::vector<std::pair<double, double>> grid_points(std::uint32_t width, std::uint32_t height,
                                                   int grid_size) {
    if (grid_size < 1 || static_cast<std::uint32_t>(grid_size) > std::min(width, height))
        throw InvalidInput("grid_size must be in [1, min(width, height)]");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<std::size_t>(grid_size) * grid_size);
    for (int r = 0; r < grid_size; ++r) {
        double y = std::floor((r + 0.5) * static_cast<double>(height) / grid_size);
        for (int c = 0; c < grid_size; ++c) {
            double x = std::floor((c + 0.5) * static_cast<double>(width) / grid_size);
            pts.emplace_back(x, y);
        }
    }
    return pts;
}

namespace {

// Mean absolute difference between the block around (px, py) in `prev` and the
// block around (qx, qy) in `next`. Interior blocks go through the SAD kernel
// row by row; border blocks fall back to clamped per-pixel sampling.
double block_cost(const Frame& prev, int px, int py, const Frame& next, int qx, int qy,
                  int radius) {
    const int side = 2 * radius + 1;
    const std::size_t samples = static_cast<std::size_t>(side) * side * prev.channels;
    const int w = static_cast<int>(prev.width);
    const int h = static_cast<int>(prev.height);

    const bool interior = px - radius >= 0 && px + radius < w && py - radius >= 0 &&
                          py + radius < h && qx - radius >= 0 && qx + radius < w &&
                          qy - radius >= 0 && qy + radius < h;
    std::uint64_t sad = 0;
    if (interior) {
        const std::size_t row_samples = static_cast<std::size_t>(side) * prev.channels;
        for (int dy = -radius; dy <= radius; ++dy) {
            const std::uint8_t* a =
                prev.data.data() +
                (static_cast<std::size_t>(py + dy) * w + (px - radius)) * prev.channels;
            const std::uint8_t* b =
                next.data.data() +
                (static_cast<std::size_t>(qy + dy) * w + (qx - radius)) * next.channels;
            sad += kernels::sad_u8(a, b, row_samples);
        }
    } else {
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                for (std::uint32_t c = 0; c < prev.channels; ++c) {
                    int d = static_cast<int>(prev.at_clamped(px + dx, py + dy, c)) -
                            static_cast<int>(next.at_clamped(qx + dx, qy + dy, c));
                    sad += static_cast<std::uint64_t>(d < 0 ? -d : d);
                }
    }
    return static_cast<double>(sad) / static_cast<double>(samples);
}

}  // namespace

TrajectorySet track_forward(const Clip& clip, const TrackerConfig& cfg) {
    cfg.validate();
    clip.validate();
    const Frame& first = clip.frames.front();
    const auto pts = grid_points(first.width, first.height, cfg.grid_size);
    const std::size_t L = clip.length();
    const int w = static_cast<int>(first.width);
    const int h = static_cast<int>(first.height);

    TrajectorySet set;
    set.frame_count = static_cast<std::uint16_t>(L);
    set.grid_size = cfg.grid_size;
    set.width = first.width;
    set.height = first.height;
    set.trajectories.resize(pts.size());

    for (std::size_t p = 0; p < pts.size(); ++p) {
        Trajectory& t = set.trajectories[p];
        t.origin_row = static_cast<int>(p) / cfg.grid_size;
        t.origin_col = static_cast<int>(p) % cfg.grid_size;
        t.xs.resize(L);
        t.ys.resize(L);
        t.vis.resize(L);
        int cx = static_cast<int>(pts[p].first);
        int cy = static_cast<int>(pts[p].second);
        t.xs[0] = cx;
        t.ys[0] = cy;
        t.vis[0] = 1;

        // The matching reference is the point's appearance in the last frame
        // where it was visible. While occluded the position freezes, so the
        // point can reattach if its appearance returns nearby.
        std::size_t ref_frame = 0;

        for (std::size_t f = 0; f + 1 < L; ++f) {
            const Frame& ref = clip.frames[ref_frame];
            const Frame& next = clip.frames[f + 1];
            double best_cost = std::numeric_limits<double>::infinity();
            int best_d2 = 0, best_dx = 0, best_dy = 0;
            for (int dy = -cfg.search_radius; dy <= cfg.search_radius; ++dy) {
                int qy = cy + dy;
                if (qy < 0 || qy >= h) continue;
                for (int dx = -cfg.search_radius; dx <= cfg.search_radius; ++dx) {
                    int qx = cx + dx;
                    if (qx < 0 || qx >= w) continue;
                    double cost = block_cost(ref, cx, cy, next, qx, qy, cfg.block_radius);
                    int d2 = dx * dx + dy * dy;
                    // Ties prefer the smallest displacement so flat regions
                    // do not drift, then a fixed scan order.
                    bool better = cost < best_cost ||
                                  (cost == best_cost &&
                                   (d2 < best_d2 || (d2 == best_d2 &&
                                                     (dy < best_dy ||
                                                      (dy == best_dy && dx < best_dx)))));
                    if (better) {
                        best_cost = cost;
                        best_d2 = d2;
                        best_dx = dx;
                        best_dy = dy;
                    }
                }
            }
            if (best_cost <= cfg.visibility_threshold) {
                cx += best_dx;
                cy += best_dy;
                t.vis[f + 1] = 1;
                ref_frame = f + 1;
            } else {
                t.vis[f + 1] = 0;
            }
            t.xs[f + 1] = cx;
            t.ys[f + 1] = cy;
        }
    }
    return set;
}

TrajectorySet track_backward(const Clip& clip, const TrackerConfig& cfg) {
    return track_forward(clip.reversed(), cfg);
}

namespace {

Trajectory flip_trajectory(const Trajectory& t) {
    Trajectory f = t;
    std::reverse(f.xs.begin(), f.xs.end());
    std::reverse(f.ys.begin(), f.ys.end());
    std::reverse(f.vis.begin(), f.vis.end());
    f.backward_flipped = true;
    return f;
}

}  // namespace

TrajectorySet fuse_bidirectional(const TrajectorySet& fwd, const TrajectorySet& bwd) {
    if (!bwd.trajectories.empty() && fwd.frame_count != bwd.frame_count)
        throw InvalidInput("forward/backward frame counts differ");
    if (!bwd.trajectories.empty() && fwd.grid_size != bwd.grid_size)
        throw InvalidInput("forward/backward grid sizes differ");

    TrajectorySet out = fwd;
    if (bwd.trajectories.empty()) return out;

    const double cell_w = fwd.grid_size > 0
                              ? static_cast<double>(fwd.width) / fwd.grid_size
                              : 1.0;
    const double cell_h = fwd.grid_size > 0
                              ? static_cast<double>(fwd.height) / fwd.grid_size
                              : 1.0;
    const std::size_t L = fwd.frame_count;

    auto duplicate = [&](const Trajectory& cand) {
        for (const Trajectory& ref : fwd.trajectories) {
            if (std::fabs(cand.xs[0] - ref.xs[0]) > cell_w ||
                std::fabs(cand.ys[0] - ref.ys[0]) > cell_h)
                continue;
            bool agree = true;
            for (std::size_t f = 0; f < L && agree; ++f) {
                if (!cand.vis[f] || !ref.vis[f]) continue;
                if (std::fabs(cand.xs[f] - ref.xs[f]) > cell_w ||
                    std::fabs(cand.ys[f] - ref.ys[f]) > cell_h)
                    agree = false;
            }
            if (agree) return true;
        }
        return false;
    };

    for (const Trajectory& b : bwd.trajectories) {
        Trajectory flipped = flip_trajectory(b);
        if (!duplicate(flipped)) out.trajectories.push_back(std::move(flipped));
    }
    return out;
}

}  // namespace tgvc
