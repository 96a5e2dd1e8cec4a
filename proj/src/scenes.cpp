#include "tgvc/scenes.hpp"

#include <cmath>

namespace tgvc {

namespace {

constexpr int kGrid = 16;      // canonical latent size for the toy scenes
constexpr int kChannels = 1;

void add_blob(LatentSequence& z, int frame, double cx, double cy, double amp, double sigma) {
    for (int y = 0; y < z.height; ++y)
        for (int x = 0; x < z.width; ++x) {
            double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            for (int c = 0; c < z.channels; ++c)
                z.at(frame, y, x, c) += amp * std::exp(-r2 / (2.0 * sigma * sigma));
        }
}

struct Path {
    double x0, y0, x1, y1;
    double x(double u) const { return x0 + u * (x1 - x0); }
    double y(double u) const { return y0 + u * (y1 - y0); }
};

SparseTrajectory path_trajectory(const Path& p, int length) {
    SparseTrajectory t;
    for (int k = 0; k < length; ++k) {
        double u = static_cast<double>(k) / (length - 1);
        t.points.push_back({quantize_coord(std::round(p.x(u)), 1, kGrid),
                            quantize_coord(std::round(p.y(u)), 1, kGrid)});
        t.vis.push_back(1);
    }
    return t;
}

KeyLatents keys_from_target(const LatentSequence& target) {
    KeyLatents keys;
    keys.first.assign(target.frame(0), target.frame(0) + target.frame_size());
    keys.last.assign(target.frame(15), target.frame(15) + target.frame_size());
    return keys;
}

ToyScene blob_scene(int length) {
    const Path path{2, 3, 13, 3};
    ToyScene scene;
    scene.length = length;
    scene.denoiser.target = LatentSequence::zeros(kGrid, kGrid, kGrid, kChannels);
    for (int f = 0; f < kGrid; ++f) {
        double u = static_cast<double>(f) / (kGrid - 1);
        add_blob(scene.denoiser.target, f, std::round(path.x(u)), std::round(path.y(u)), 1.0,
                 1.2);
    }
    scene.keys = keys_from_target(scene.denoiser.target);

    SparseInstance inst;
    inst.trajectories.push_back(path_trajectory(path, length));
    scene.sparse.latent_w = kGrid;
    scene.sparse.latent_h = kGrid;
    scene.sparse.frame_count = static_cast<std::uint16_t>(length);
    scene.sparse.instances.push_back(std::move(inst));
    return scene;
}

ToyScene two_blob_scene(int length) {
    // The keyframes carry both blobs at their endpoint positions, but the
    // denoiser target keeps every interior frame empty, so the prior refuses
    // the transmitted motion. The amplitude sits where the guidance nudge is
    // a large relative correction.
    constexpr double kAmp = 0.006;
    const Path top{2, 3, 13, 3};
    const Path bottom{13, 12, 2, 12};

    ToyScene scene;
    scene.length = length;
    scene.denoiser.target = LatentSequence::zeros(kGrid, kGrid, kGrid, kChannels);
    add_blob(scene.denoiser.target, 0, top.x0, top.y0, kAmp, 1.0);
    add_blob(scene.denoiser.target, 0, bottom.x0, bottom.y0, kAmp, 1.0);
    add_blob(scene.denoiser.target, 15, top.x1, top.y1, kAmp, 1.0);
    add_blob(scene.denoiser.target, 15, bottom.x1, bottom.y1, kAmp, 1.0);
    scene.keys = keys_from_target(scene.denoiser.target);

    scene.sparse.latent_w = kGrid;
    scene.sparse.latent_h = kGrid;
    scene.sparse.frame_count = static_cast<std::uint16_t>(length);
    for (const Path& p : {top, bottom}) {
        SparseInstance inst;
        inst.trajectories.push_back(path_trajectory(p, length));
        scene.sparse.instances.push_back(std::move(inst));
    }
    return scene;
}

ToyScene shear_scene(int length) {
    ToyScene scene;
    scene.length = length;
    scene.denoiser.target = LatentSequence::zeros(kGrid, kGrid, kGrid, kChannels);
    constexpr double kTau = 6.28318530717958647692;
    for (int f = 0; f < kGrid; ++f)
        for (int y = 0; y < kGrid; ++y) {
            double shift = f * 0.4 * y / (kGrid - 1);
            for (int x = 0; x < kGrid; ++x)
                scene.denoiser.target.at(f, y, x, 0) =
                    std::cos(kTau * (x - shift) / 8.0) * std::cos(kTau * y / 8.0);
        }
    scene.keys = keys_from_target(scene.denoiser.target);

    scene.sparse.latent_w = kGrid;
    scene.sparse.latent_h = kGrid;
    scene.sparse.frame_count = static_cast<std::uint16_t>(length);
    SparseInstance inst;
    for (int row : {4, 8, 12}) {
        SparseTrajectory t;
        for (int k = 0; k < length; ++k) {
            double f = static_cast<double>(k) * (kGrid - 1) / (length - 1);
            double x = 3.0 + f * 0.4 * row / (kGrid - 1);
            t.points.push_back({quantize_coord(std::round(x), 1, kGrid),
                                quantize_coord(row, 1, kGrid)});
            t.vis.push_back(1);
        }
        inst.trajectories.push_back(std::move(t));
    }
    scene.sparse.instances.push_back(std::move(inst));
    return scene;
}

}  // namespace

ToyScene make_scene(const std::string& name, int length) {
    if (length < 2 || length > 30) throw InvalidInput("scene length must be in [2, 30]");
    if (name == "blob") return blob_scene(length);
    if (name == "two-blob") return two_blob_scene(length);
    if (name == "shear") return shear_scene(length);
    throw InvalidInput("unknown scene: " + name + " (expected blob, two-blob or shear)");
}

}  // namespace tgvc
