#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tgvc/guidance.hpp"
#include "tgvc/latent.hpp"
#include "tgvc/sampler.hpp"

namespace tgvc {

struct DDIMSchedule {
    std::vector<double> alpha_bar;  // strictly decreasing over the step index

    int steps() const { return static_cast<int>(alpha_bar.size()); }
};

/// Cosine alpha-bar schedule evaluated at the step grid, clamped to
/// [1e-4, 1]. The sampler walks the sequence from the back; the transition
/// out of the first entry goes to alpha_bar = 1 exactly.
DDIMSchedule make_schedule(int steps);

/// Stand-in denoiser: the exact noise predictor of a point-mass data
/// distribution concentrated on `target` (one canonical 16-frame latent
/// clip), so unguided sampling converges to the target.
struct ToyDenoiser {
    LatentSequence target;
};

/// eps = (z_t - sqrt(alpha_bar) * target) / sqrt(1 - alpha_bar)
LatentSequence toy_eps(const ToyDenoiser& denoiser, const LatentSequence& z_t,
                       double alpha_bar);

/// Deterministic DDIM transition:
/// z_prev = sqrt(ab_prev) * x0_hat + sqrt(1 - ab_prev) * eps_hat.
LatentSequence ddim_step(const LatentSequence& z_t, const LatentSequence& eps_hat,
                         double alpha_bar_t, double alpha_bar_prev);

/// Positional markers of L source frames on the canonical L_hat-frame grid:
/// m_k = round(k * (L_hat - 1) / (L - 1)), strictly increasing.
std::vector<int> marker_positions(int L, int L_hat = 16);

/// Stretches an L-frame sparse set onto the canonical grid: linear
/// interpolation in continuous cell coordinates between marker positions,
/// re-quantized; marker frames carry the original points exactly.
std::pair<SparseTrajectorySet, std::vector<int>> interpolate_trajectories(
    const SparseTrajectorySet& sparse, int L, int L_hat = 16);

/// Trajectory slice over clip frames [first, last], inclusive.
SparseTrajectorySet slice_sparse(const SparseTrajectorySet& sparse, int first, int last);

struct StagePlan {
    int first_frame = 0;
    int last_frame = 0;
    std::vector<int> markers;  // per segment frame, position on the 16-grid

    int length() const { return last_frame - first_frame + 1; }
};

/// One stage for L <= 16; two stages split at ceil(L/2) otherwise, sharing
/// the split frame (generated by stage one, re-used as stage two's starting
/// keyframe). Valid for L in [2, 30].
struct GenerationPlan {
    int length = 0;
    std::vector<StagePlan> stages;
};

GenerationPlan plan_generation(int L);

/// Pair of clean keyframe latents (single frames, matching the latent dims).
struct KeyLatents {
    std::vector<double> first;
    std::vector<double> last;
};

using StepObserver = std::function<void(int stage, int step, const LatentSequence&)>;

/// Runs the guided DDIM simulation and emits exactly plan.length frames.
/// Per step: denoiser eps, guided update (gradient onto keyframe positions
/// discarded), clean keyframe re-injection, DDIM transition; marker frames
/// are emitted after the last step.
LatentSequence generate_clip(const KeyLatents& keys, const SparseTrajectorySet& sparse,
                             const GenerationPlan& plan, const DDIMSchedule& schedule,
                             const GuidanceConfig& cfg, const ToyDenoiser& denoiser,
                             std::uint64_t seed, const StepObserver& observer = {});

}  // namespace tgvc
