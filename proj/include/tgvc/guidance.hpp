#pragma once

#include <utility>
#include <vector>

#include "tgvc/latent.hpp"
#include "tgvc/sampler.hpp"

namespace tgvc {

enum class WeightMode { linear, uniform };

struct GuidanceConfig {
    double scale_coeff = 30.0;  // s(t) = scale_coeff * sqrt(1 - alpha_bar_t)
    WeightMode weight_mode = WeightMode::linear;
    bool enabled = true;

    void validate() const {
        if (scale_coeff < 0) throw InvalidInput("scale_coeff must be >= 0");
    }
};

/// Bilinear sample at cell-center coordinates; integer coordinates reduce to a
/// direct lookup. Out-of-bounds points throw InvalidInput.
double sample_bilinear(const LatentSequence& z, int frame, double x, double y, int c);

/// Feature vector of one latent frame along a point list: channels of every
/// visible point, in point order. Occluded points contribute nothing.
std::vector<double> sample_feature(const LatentSequence& z, int frame,
                                   const std::vector<std::pair<double, double>>& points,
                                   const std::vector<std::uint8_t>& vis);

/// Trajectory-alignment loss over predicted-clean latents: for each interior
/// frame i, the L1 distance between its features along each instance's
/// trajectory and the matching features at frames 0 and L-1, weighted by
/// alpha_i / beta_i (linear: alpha_i = (L-1-i)/(L-1), beta_i = i/(L-1)).
/// Points occluded at either endpoint of a comparison are skipped.
double loss_Lm(const LatentSequence& z0_hat, const SparseTrajectorySet& sparse,
               const GuidanceConfig& cfg);

/// z0_hat = (z_t - sqrt(1 - alpha_bar) * eps) / sqrt(alpha_bar)
LatentSequence predict_x0(const LatentSequence& z_t, const LatentSequence& eps,
                          double alpha_bar);

/// Analytic gradient of loss_Lm(predict_x0(z_t, eps)) with respect to z_t,
/// with eps treated as a constant.
LatentSequence grad_Lm(const LatentSequence& z_t, const LatentSequence& eps, double alpha_bar,
                       const SparseTrajectorySet& sparse, const GuidanceConfig& cfg);

/// eps_hat = eps + s(t) * grad. Disabled guidance or a zero coefficient
/// returns eps bit-exactly.
LatentSequence guided_epsilon(const LatentSequence& eps, const LatentSequence& grad,
                              double alpha_bar, const GuidanceConfig& cfg);

/// Weighted mean absolute feature gap along the transmitted trajectories,
/// measured against the keyframe features; the per-run quality metric.
double trajectory_misalignment(const LatentSequence& z, const SparseTrajectorySet& sparse,
                               WeightMode mode = WeightMode::linear);

}  // namespace tgvc
