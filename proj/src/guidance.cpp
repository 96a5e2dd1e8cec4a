#include "tgvc/guidance.hpp"

#include <cmath>

#include "tgvc/kernels.hpp"

namespace tgvc {

namespace {

struct BilinearTap {
    int x[2];
    int y[2];
    double wx[2];
    double wy[2];
};

BilinearTap bilinear_tap(const LatentSequence& z, double px, double py) {
    if (!(px >= 0.0) || !(py >= 0.0) || px > z.width - 1 || py > z.height - 1)
        throw InvalidInput("sample point outside the latent grid");
    BilinearTap t;
    int x0 = static_cast<int>(std::floor(px));
    int y0 = static_cast<int>(std::floor(py));
    double fx = px - x0;
    double fy = py - y0;
    t.x[0] = x0;
    t.x[1] = x0 + 1 < z.width ? x0 + 1 : x0;
    t.y[0] = y0;
    t.y[1] = y0 + 1 < z.height ? y0 + 1 : y0;
    t.wx[0] = 1.0 - fx;
    t.wx[1] = fx;
    t.wy[0] = 1.0 - fy;
    t.wy[1] = fy;
    return t;
}

double weight_alpha(WeightMode mode, int i, int L) {
    if (mode == WeightMode::uniform) return 0.5;
    return static_cast<double>(L - 1 - i) / static_cast<double>(L - 1);
}

double weight_beta(WeightMode mode, int i, int L) {
    if (mode == WeightMode::uniform) return 0.5;
    return static_cast<double>(i) / static_cast<double>(L - 1);
}

void check_sparse(const LatentSequence& z, const SparseTrajectorySet& sparse) {
    if (z.frames != sparse.frame_count)
        throw InvalidInput("latent frame count does not match the sparse set");
}

// Matched features of one trajectory at frames (fa, fb): channels of every
// point visible at both frames.
void gather_pair(const LatentSequence& z, const SparseTrajectory& t, int fa, int fb,
                 std::vector<double>& va, std::vector<double>& vb) {
    va.clear();
    vb.clear();
    if (!t.vis[static_cast<std::size_t>(fa)] || !t.vis[static_cast<std::size_t>(fb)]) return;
    const SparsePoint& pa = t.points[static_cast<std::size_t>(fa)];
    const SparsePoint& pb = t.points[static_cast<std::size_t>(fb)];
    for (int c = 0; c < z.channels; ++c) {
        va.push_back(sample_bilinear(z, fa, pa.x, pa.y, c));
        vb.push_back(sample_bilinear(z, fb, pb.x, pb.y, c));
    }
}

}  // namespace

double sample_bilinear(const LatentSequence& z, int frame, double x, double y, int c) {
    BilinearTap t = bilinear_tap(z, x, y);
    double v = 0;
    for (int iy = 0; iy < 2; ++iy)
        for (int ix = 0; ix < 2; ++ix)
            v += t.wy[iy] * t.wx[ix] * z.at(frame, t.y[iy], t.x[ix], c);
    return v;
}

std::vector<double> sample_feature(const LatentSequence& z, int frame,
                                   const std::vector<std::pair<double, double>>& points,
                                   const std::vector<std::uint8_t>& vis) {
    if (vis.size() != points.size()) throw InvalidInput("visibility/point count mismatch");
    std::vector<double> out;
    out.reserve(points.size() * static_cast<std::size_t>(z.channels));
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (!vis[p]) continue;
        for (int c = 0; c < z.channels; ++c)
            out.push_back(sample_bilinear(z, frame, points[p].first, points[p].second, c));
    }
    return out;
}

double loss_Lm(const LatentSequence& z0_hat, const SparseTrajectorySet& sparse,
               const GuidanceConfig& cfg) {
    cfg.validate();
    check_sparse(z0_hat, sparse);
    const int L = z0_hat.frames;
    if (L < 3) return 0.0;

    double loss = 0;
    std::vector<double> va, vb;
    for (int i = 1; i <= L - 2; ++i) {
        const double wk[2] = {weight_alpha(cfg.weight_mode, i, L),
                              weight_beta(cfg.weight_mode, i, L)};
        const int kf[2] = {0, L - 1};
        for (int s = 0; s < 2; ++s) {
            for (const SparseInstance& inst : sparse.instances) {
                for (const SparseTrajectory& t : inst.trajectories) {
                    gather_pair(z0_hat, t, kf[s], i, va, vb);
                    if (!va.empty())
                        loss += wk[s] * kernels::l1_f64(va.data(), vb.data(), va.size());
                }
            }
        }
    }
    return loss;
}

LatentSequence predict_x0(const LatentSequence& z_t, const LatentSequence& eps,
                          double alpha_bar) {
    z_t.require_shape(eps, "predict_x0");
    if (!(alpha_bar > 0.0) || alpha_bar > 1.0)
        throw InvalidInput("alpha_bar must be in (0, 1]");
    LatentSequence out = z_t;
    const double c1 = std::sqrt(1.0 - alpha_bar);
    const double c2 = 1.0 / std::sqrt(alpha_bar);
    kernels::scale_sub_f64(out.data.data(), z_t.data.data(), c1, eps.data.data(), c2,
                           out.data.size());
    return out;
}

LatentSequence grad_Lm(const LatentSequence& z_t, const LatentSequence& eps, double alpha_bar,
                       const SparseTrajectorySet& sparse, const GuidanceConfig& cfg) {
    cfg.validate();
    check_sparse(z_t, sparse);
    LatentSequence z0 = predict_x0(z_t, eps, alpha_bar);
    LatentSequence grad = LatentSequence::zeros(z_t.frames, z_t.height, z_t.width, z_t.channels);
    const int L = z_t.frames;
    if (L < 3) return grad;

    auto scatter = [&](int frame, const SparsePoint& p, int c, double g) {
        BilinearTap t = bilinear_tap(z0, p.x, p.y);
        for (int iy = 0; iy < 2; ++iy)
            for (int ix = 0; ix < 2; ++ix)
                grad.at(frame, t.y[iy], t.x[ix], c) += t.wy[iy] * t.wx[ix] * g;
    };

    for (int i = 1; i <= L - 2; ++i) {
        const double wk[2] = {weight_alpha(cfg.weight_mode, i, L),
                              weight_beta(cfg.weight_mode, i, L)};
        const int kf[2] = {0, L - 1};
        for (int s = 0; s < 2; ++s) {
            const int k = kf[s];
            for (const SparseInstance& inst : sparse.instances) {
                for (const SparseTrajectory& t : inst.trajectories) {
                    if (!t.vis[static_cast<std::size_t>(k)] ||
                        !t.vis[static_cast<std::size_t>(i)])
                        continue;
                    const SparsePoint& pk = t.points[static_cast<std::size_t>(k)];
                    const SparsePoint& pi = t.points[static_cast<std::size_t>(i)];
                    for (int c = 0; c < z_t.channels; ++c) {
                        double diff = sample_bilinear(z0, k, pk.x, pk.y, c) -
                                      sample_bilinear(z0, i, pi.x, pi.y, c);
                        double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
                        if (sign == 0.0) continue;
                        scatter(k, pk, c, wk[s] * sign);
                        scatter(i, pi, c, -wk[s] * sign);
                    }
                }
            }
        }
    }

    // Chain rule through z0_hat = (z_t - sqrt(1-a)*eps) / sqrt(a), eps frozen.
    const double chain = 1.0 / std::sqrt(alpha_bar);
    for (double& g : grad.data) g *= chain;
    return grad;
}

LatentSequence guided_epsilon(const LatentSequence& eps, const LatentSequence& grad,
                              double alpha_bar, const GuidanceConfig& cfg) {
    cfg.validate();
    if (!cfg.enabled || cfg.scale_coeff == 0.0) return eps;
    eps.require_shape(grad, "guided_epsilon");
    if (alpha_bar < 0.0 || alpha_bar > 1.0) throw InvalidInput("alpha_bar must be in [0, 1]");
    LatentSequence out = eps;
    const double scale = cfg.scale_coeff * std::sqrt(1.0 - alpha_bar);
    kernels::axpy_f64(out.data.data(), scale, grad.data.data(), out.data.size());
    return out;
}

double trajectory_misalignment(const LatentSequence& z, const SparseTrajectorySet& sparse,
                               WeightMode mode) {
    check_sparse(z, sparse);
    const int L = z.frames;
    if (L < 3) return 0.0;
    double num = 0, den = 0;
    std::vector<double> va, vb;
    for (int i = 1; i <= L - 2; ++i) {
        const double wk[2] = {weight_alpha(mode, i, L), weight_beta(mode, i, L)};
        const int kf[2] = {0, L - 1};
        for (int s = 0; s < 2; ++s) {
            for (const SparseInstance& inst : sparse.instances) {
                for (const SparseTrajectory& t : inst.trajectories) {
                    gather_pair(z, t, kf[s], i, va, vb);
                    if (va.empty()) continue;
                    num += wk[s] * kernels::l1_f64(va.data(), vb.data(), va.size());
                    den += wk[s] * static_cast<double>(va.size());
                }
            }
        }
    }
    return den > 0 ? num / den : 0.0;
}

}  // namespace tgvc
