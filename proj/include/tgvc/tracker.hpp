#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tgvc/frame.hpp"

namespace tgvc {

/// One tracked point: per-frame position plus a visibility flag. Occluded
/// frames keep the last matched position with vis = 0 so every trajectory
/// spans the full clip.
struct Trajectory {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::uint8_t> vis;
    int origin_row = 0;
    int origin_col = 0;
    bool backward_flipped = false;

    std::size_t length() const { return xs.size(); }

    bool operator==(const Trajectory& o) const {
        return xs == o.xs && ys == o.ys && vis == o.vis && origin_row == o.origin_row &&
               origin_col == o.origin_col && backward_flipped == o.backward_flipped;
    }
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;
    std::uint16_t frame_count = 0;
    int grid_size = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    bool operator==(const TrajectorySet& o) const {
        return trajectories == o.trajectories && frame_count == o.frame_count &&
               grid_size == o.grid_size;
    }
};

struct TrackerConfig {
    int grid_size = 64;
    int block_radius = 3;
    int search_radius = 4;
    double visibility_threshold = 20.0;  // mean abs difference per sample

    void validate() const {
        if (grid_size < 2) throw InvalidInput("grid_size must be >= 2");
        if (search_radius < 1) throw InvalidInput("search_radius must be >= 1");
        if (block_radius < 0) throw InvalidInput("block_radius must be >= 0");
    }
};

/// grid_size x grid_size integer points, equally spaced, inset by half a cell,
/// row-major order.
std::vector<std::pair<double, double>> grid_points(std::uint32_t width, std::uint32_t height,
                                                   int grid_size);

/// Block-matching tracker seeded on the grid of the first frame. Position t+1
/// minimizes the mean absolute block difference within search_radius of
/// position t; visibility drops when the best cost exceeds the threshold.
TrajectorySet track_forward(const Clip& clip, const TrackerConfig& cfg);

/// track_forward applied to the time-reversed clip.
TrajectorySet track_backward(const Clip& clip, const TrackerConfig& cfg);

/// Forward set plus time-flipped backward trajectories, with flipped tracks
/// dropped when they agree with an existing forward track within one grid
/// cell at frame 0 and on every mutually visible frame.
TrajectorySet fuse_bidirectional(const TrajectorySet& fwd, const TrajectorySet& bwd);

// Track interchange format: one JSON document per clip with fields
//   L (int), grid_size (int), tracks: [{origin: [row, col],
//   xy: [[x, y] * L], vis: [0/1 * L]}].
TrajectorySet import_tracks(const std::string& path);
void export_tracks(const TrajectorySet& set, const std::string& path);
TrajectorySet tracks_from_json(const std::string& text);
std::string tracks_to_json(const TrajectorySet& set);

}  // namespace tgvc
