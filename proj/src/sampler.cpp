#include "tgvc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tgvc/rng.hpp"

namespace tgvc {

int keypoint_budget(double s_inter, std::size_t n_i, std::size_t n_total,
                    const BudgetConfig& cfg) {
    cfg.validate();
    if (n_i < 1 || n_total < n_i) throw InvalidInput("need n_total >= n_i >= 1");
    double s_hat = cfg.score_norm > 0 ? std::min(s_inter / cfg.score_norm, 1.0) : 0.0;
    double share = static_cast<double>(n_i) / static_cast<double>(n_total);
    double raw = (cfg.alpha * s_hat + cfg.beta * share) * cfg.k_max;
    long k = std::lround(raw);
    if (k > cfg.k_max) k = cfg.k_max;
    if (k < 1) k = 1;
    return static_cast<int>(k);
}

namespace {

double sq_dist6(const std::array<double, 6>& a, const std::array<double, 6>& b) {
    double s = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<std::size_t> kmeans_sample(const std::vector<std::array<double, 6>>& feats, int k,
                                       std::uint64_t seed) {
    const std::size_t n = feats.size();
    if (n == 0) return {};
    if (k < 1) k = 1;
    if (static_cast<std::size_t>(k) >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    Rng rng(seed);

    // k-means++ seeding.
    std::vector<std::array<double, 6>> centers;
    centers.reserve(kk);
    centers.push_back(feats[rng.uniform_index(n)]);
    std::vector<double> d2(n);
    while (centers.size() < kk) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist6(feats[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0) {
            pick = rng.uniform_index(n);  // all points coincide with a center
        } else {
            double r = rng.uniform() * total;
            pick = n - 1;
            double acc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(feats[pick]);
    }

    // Lloyd iterations.
    std::vector<std::size_t> assign(n, 0);
    constexpr int kMaxIters = 100;
    constexpr double kTol = 1e-6;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bc = 0;
            for (std::size_t c = 0; c < kk; ++c) {
                double d = sq_dist6(feats[i], centers[c]);
                if (d < best) {
                    best = d;
                    bc = c;
                }
            }
            assign[i] = bc;
        }
        std::vector<std::array<double, 6>> sums(kk, std::array<double, 6>{});
        std::vector<std::size_t> counts(kk, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < 6; ++d) sums[assign[i]][d] += feats[i][d];
            ++counts[assign[i]];
        }
        double moved = 0;
        for (std::size_t c = 0; c < kk; ++c) {
            std::array<double, 6> nc{};
            if (counts[c] > 0) {
                for (std::size_t d = 0; d < 6; ++d)
                    nc[d] = sums[c][d] / static_cast<double>(counts[c]);
            } else {
                // Reseed an empty cluster on the point farthest from any center.
                double far_d = -1;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const auto& cc : centers) best = std::min(best, sq_dist6(feats[i], cc));
                    if (best > far_d) {
                        far_d = best;
                        far_i = i;
                    }
                }
                nc = feats[far_i];
            }
            moved = std::max(moved, std::sqrt(sq_dist6(centers[c], nc)));
            centers[c] = nc;
        }
        if (moved < kTol) break;
    }

    // Medoid per cluster: the member nearest the converged center.
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bc = 0;
        for (std::size_t c = 0; c < kk; ++c) {
            double d = sq_dist6(feats[i], centers[c]);
            if (d < best) {
                best = d;
                bc = c;
            }
        }
        assign[i] = bc;
    }
    std::vector<std::size_t> medoid(kk, SIZE_MAX);
    std::vector<double> medoid_d(kk, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        double d = sq_dist6(feats[i], centers[assign[i]]);
        if (d < medoid_d[assign[i]]) {
            medoid_d[assign[i]] = d;
            medoid[assign[i]] = i;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < kk; ++c)
        if (medoid[c] != SIZE_MAX) out.push_back(medoid[c]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // Coincident centers can collapse to one medoid; pad deterministically so
    // exactly k distinct members come back.
    for (std::size_t i = 0; i < n && out.size() < kk; ++i)
        if (!std::binary_search(out.begin(), out.end(), i)) {
            out.insert(std::lower_bound(out.begin(), out.end(), i), i);
        }
    return out;
}

std::vector<std::size_t> random_sample(std::size_t n, int k, std::uint64_t seed) {
    if (k < 1) k = 1;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (static_cast<std::size_t>(k) >= n) return idx;
    Rng rng(seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
        std::size_t j = i + rng.uniform_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::uint16_t quantize_coord(double v, int factor, int latent_dim) {
    if (factor < 1) throw InvalidInput("quantization factor must be >= 1");
    long q = static_cast<long>(std::floor(v / factor));
    if (q < 0) q = 0;
    if (q > latent_dim - 1) q = latent_dim - 1;
    return static_cast<std::uint16_t>(q);
}

SparseTrajectorySet quantize_trajectories(
    const std::vector<std::vector<const Trajectory*>>& per_instance, std::uint32_t width,
    std::uint32_t height, int factor) {
    if (factor < 1) throw InvalidInput("quantization factor must be >= 1");
    SparseTrajectorySet set;
    set.latent_w = static_cast<std::uint16_t>((width + factor - 1) / factor);
    set.latent_h = static_cast<std::uint16_t>((height + factor - 1) / factor);
    for (const auto& members : per_instance) {
        SparseInstance inst;
        for (const Trajectory* t : members) {
            SparseTrajectory q;
            q.vis = t->vis;
            q.points.reserve(t->length());
            for (std::size_t f = 0; f < t->length(); ++f)
                q.points.push_back({quantize_coord(t->xs[f], factor, set.latent_w),
                                    quantize_coord(t->ys[f], factor, set.latent_h)});
            set.frame_count = static_cast<std::uint16_t>(t->length());
            inst.trajectories.push_back(std::move(q));
        }
        set.instances.push_back(std::move(inst));
    }
    return set;
}

}  // namespace tgvc
