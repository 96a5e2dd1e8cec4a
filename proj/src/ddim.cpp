#include "tgvc/ddim.hpp"

#include <algorithm>
#include <cmath>

#include "tgvc/kernels.hpp"
#include "tgvc/rng.hpp"

namespace tgvc {

DDIMSchedule make_schedule(int steps) {
    if (steps < 1) throw InvalidInput("steps must be >= 1");
    if (steps > 100) throw InvalidInput("steps above 100 are not supported");
    DDIMSchedule s;
    s.alpha_bar.resize(static_cast<std::size_t>(steps));
    constexpr double kHalfPi = 1.57079632679489661923;
    for (int t = 0; t < steps; ++t) {
        double arg = (static_cast<double>(t) / steps + 0.008) / 1.008 * kHalfPi;
        double v = std::cos(arg);
        v = v * v;
        s.alpha_bar[static_cast<std::size_t>(t)] = std::clamp(v, 1e-4, 1.0);
    }
    for (int t = 0; t + 1 < steps; ++t)
        if (!(s.alpha_bar[static_cast<std::size_t>(t)] >
              s.alpha_bar[static_cast<std::size_t>(t + 1)]))
            throw InvalidInput("schedule is not strictly decreasing");
    return s;
}

LatentSequence toy_eps(const ToyDenoiser& denoiser, const LatentSequence& z_t,
                       double alpha_bar) {
    z_t.require_shape(denoiser.target, "toy_eps");
    if (!(alpha_bar > 0.0) || alpha_bar >= 1.0)
        throw InvalidInput("toy_eps needs alpha_bar in (0, 1)");
    LatentSequence eps = z_t;
    const double c1 = std::sqrt(alpha_bar);
    const double c2 = 1.0 / std::sqrt(1.0 - alpha_bar);
    kernels::scale_sub_f64(eps.data.data(), z_t.data.data(), c1, denoiser.target.data.data(),
                           c2, eps.data.size());
    return eps;
}

LatentSequence ddim_step(const LatentSequence& z_t, const LatentSequence& eps_hat,
                         double alpha_bar_t, double alpha_bar_prev) {
    z_t.require_shape(eps_hat, "ddim_step");
    LatentSequence x0 = predict_x0(z_t, eps_hat, alpha_bar_t);
    LatentSequence out = z_t;
    kernels::lincomb_f64(out.data.data(), std::sqrt(alpha_bar_prev), x0.data.data(),
                         std::sqrt(1.0 - alpha_bar_prev), eps_hat.data.data(),
                         out.data.size());
    return out;
}

std::vector<int> marker_positions(int L, int L_hat) {
    if (L < 2 || L > L_hat) throw InvalidInput("marker positions need 2 <= L <= L_hat");
    std::vector<int> m(static_cast<std::size_t>(L));
    for (int k = 0; k < L; ++k)
        m[static_cast<std::size_t>(k)] = static_cast<int>(
            std::lround(static_cast<double>(k) * (L_hat - 1) / (L - 1)));
    for (int k = 0; k + 1 < L; ++k)
        if (m[static_cast<std::size_t>(k)] >= m[static_cast<std::size_t>(k + 1)])
            throw InvalidInput("markers are not strictly increasing");
    return m;
}

std::pair<SparseTrajectorySet, std::vector<int>> interpolate_trajectories(
    const SparseTrajectorySet& sparse, int L, int L_hat) {
    if (sparse.frame_count != L) throw InvalidInput("sparse set length does not match L");
    std::vector<int> markers = marker_positions(L, L_hat);
    if (L == L_hat) return {sparse, markers};

    SparseTrajectorySet out;
    out.latent_w = sparse.latent_w;
    out.latent_h = sparse.latent_h;
    out.frame_count = static_cast<std::uint16_t>(L_hat);
    for (const SparseInstance& inst : sparse.instances) {
        SparseInstance oi;
        for (const SparseTrajectory& t : inst.trajectories) {
            SparseTrajectory ot;
            ot.points.resize(static_cast<std::size_t>(L_hat));
            ot.vis.resize(static_cast<std::size_t>(L_hat));
            for (int k = 0; k + 1 < L; ++k) {
                int ma = markers[static_cast<std::size_t>(k)];
                int mb = markers[static_cast<std::size_t>(k + 1)];
                const SparsePoint& pa = t.points[static_cast<std::size_t>(k)];
                const SparsePoint& pb = t.points[static_cast<std::size_t>(k + 1)];
                // A segment is usable only when both endpoints are visible.
                std::uint8_t seg_vis = t.vis[static_cast<std::size_t>(k)] &&
                                       t.vis[static_cast<std::size_t>(k + 1)];
                for (int f = ma; f <= mb; ++f) {
                    if (f == ma) {
                        ot.points[static_cast<std::size_t>(f)] = pa;
                        ot.vis[static_cast<std::size_t>(f)] = t.vis[static_cast<std::size_t>(k)];
                        continue;
                    }
                    if (f == mb) {
                        ot.points[static_cast<std::size_t>(f)] = pb;
                        ot.vis[static_cast<std::size_t>(f)] =
                            t.vis[static_cast<std::size_t>(k + 1)];
                        continue;
                    }
                    double u = static_cast<double>(f - ma) / (mb - ma);
                    double x = pa.x + u * (pb.x - pa.x);
                    double y = pa.y + u * (pb.y - pa.y);
                    ot.points[static_cast<std::size_t>(f)] = {
                        quantize_coord(x, 1, out.latent_w), quantize_coord(y, 1, out.latent_h)};
                    ot.vis[static_cast<std::size_t>(f)] = seg_vis;
                }
            }
            oi.trajectories.push_back(std::move(ot));
        }
        out.instances.push_back(std::move(oi));
    }
    return {std::move(out), std::move(markers)};
}

SparseTrajectorySet slice_sparse(const SparseTrajectorySet& sparse, int first, int last) {
    if (first < 0 || last >= sparse.frame_count || first >= last)
        throw InvalidInput("invalid slice range");
    SparseTrajectorySet out;
    out.latent_w = sparse.latent_w;
    out.latent_h = sparse.latent_h;
    out.frame_count = static_cast<std::uint16_t>(last - first + 1);
    for (const SparseInstance& inst : sparse.instances) {
        SparseInstance oi;
        for (const SparseTrajectory& t : inst.trajectories) {
            SparseTrajectory ot;
            ot.points.assign(t.points.begin() + first, t.points.begin() + last + 1);
            ot.vis.assign(t.vis.begin() + first, t.vis.begin() + last + 1);
            oi.trajectories.push_back(std::move(ot));
        }
        out.instances.push_back(std::move(oi));
    }
    return out;
}

GenerationPlan plan_generation(int L) {
    if (L < 2 || L > 30) throw InvalidInput("clip length must be in [2, 30]");
    GenerationPlan plan;
    plan.length = L;
    if (L <= 16) {
        StagePlan s;
        s.first_frame = 0;
        s.last_frame = L - 1;
        s.markers = marker_positions(L);
        plan.stages.push_back(std::move(s));
    } else {
        int mid = (L + 1) / 2;  // ceil(L / 2)
        StagePlan a;
        a.first_frame = 0;
        a.last_frame = mid;
        a.markers = marker_positions(a.length());
        StagePlan b;
        b.first_frame = mid;
        b.last_frame = L - 1;
        b.markers = marker_positions(b.length());
        plan.stages.push_back(std::move(a));
        plan.stages.push_back(std::move(b));
    }
    return plan;
}

namespace {

LatentSequence gaussian_noise(int frames, int height, int width, int channels,
                              std::uint64_t seed) {
    LatentSequence z = LatentSequence::zeros(frames, height, width, channels);
    Rng rng(seed);
    for (double& v : z.data) v = rng.normal();
    return z;
}

void inject_frame(LatentSequence& z, int frame, const std::vector<double>& latent) {
    if (latent.size() != z.frame_size()) throw InvalidInput("keyframe latent size mismatch");
    std::copy(latent.begin(), latent.end(), z.frame(frame));
}

void zero_frame(LatentSequence& z, int frame) {
    std::fill_n(z.frame(frame), z.frame_size(), 0.0);
}

}  // namespace

LatentSequence generate_clip(const KeyLatents& keys, const SparseTrajectorySet& sparse,
                             const GenerationPlan& plan, const DDIMSchedule& schedule,
                             const GuidanceConfig& cfg, const ToyDenoiser& denoiser,
                             std::uint64_t seed, const StepObserver& observer) {
    cfg.validate();
    if (sparse.frame_count != plan.length)
        throw InvalidInput("sparse set length does not match the plan");
    const LatentSequence& target = denoiser.target;
    if (target.frames != 16) throw InvalidInput("toy denoiser target must hold 16 frames");
    if (keys.first.size() != target.frame_size() || keys.last.size() != target.frame_size())
        throw InvalidInput("keyframe latent dims do not match the denoiser");

    LatentSequence output = LatentSequence::zeros(plan.length, target.height, target.width,
                                                  target.channels);
    std::vector<double> handoff;  // boundary latent passed from stage one to stage two

    for (std::size_t stage = 0; stage < plan.stages.size(); ++stage) {
        const StagePlan& sp = plan.stages[stage];
        const bool first_stage = stage == 0;
        const bool last_stage = stage + 1 == plan.stages.size();

        const std::vector<double>& key0 = first_stage ? keys.first : handoff;
        const std::vector<double>* key15 = last_stage ? &keys.last : nullptr;

        SparseTrajectorySet segment =
            plan.stages.size() == 1 ? sparse : slice_sparse(sparse, sp.first_frame, sp.last_frame);
        auto [sparse16, markers] = interpolate_trajectories(segment, sp.length());

        LatentSequence z = gaussian_noise(16, target.height, target.width, target.channels,
                                          mix_seed(seed, stage));
        const int steps = schedule.steps();
        for (int t = steps - 1; t >= 0; --t) {
            double ab_t = schedule.alpha_bar[static_cast<std::size_t>(t)];
            double ab_prev = t > 0 ? schedule.alpha_bar[static_cast<std::size_t>(t - 1)] : 1.0;

            LatentSequence eps = toy_eps(denoiser, z, ab_t);
            LatentSequence eps_hat;
            if (cfg.enabled && cfg.scale_coeff != 0.0) {
                LatentSequence grad = grad_Lm(z, eps, ab_t, sparse16, cfg);
                // Keyframe latents are held clean; their gradient is discarded.
                zero_frame(grad, 0);
                if (key15) zero_frame(grad, 15);
                eps_hat = guided_epsilon(eps, grad, ab_t, cfg);
            } else {
                eps_hat = std::move(eps);
            }
            inject_frame(z, 0, key0);
            if (key15) inject_frame(z, 15, *key15);
            z = ddim_step(z, eps_hat, ab_t, ab_prev);
            if (observer) observer(static_cast<int>(stage), t, z);
        }
        inject_frame(z, 0, key0);
        if (key15) inject_frame(z, 15, *key15);

        // Emit marker frames; a second stage starts at the boundary frame the
        // first stage already produced, so it skips its own first marker.
        int emit_from = first_stage ? 0 : 1;
        for (int k = emit_from; k < sp.length(); ++k) {
            const double* src = z.frame(sp.markers[static_cast<std::size_t>(k)]);
            std::copy_n(src, z.frame_size(), output.frame(sp.first_frame + k));
        }
        if (!last_stage) {
            const double* boundary = z.frame(sp.markers.back());
            handoff.assign(boundary, boundary + z.frame_size());
        }
    }
    return output;
}

}  // namespace tgvc
