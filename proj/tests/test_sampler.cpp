#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "tgvc/sampler.hpp"
#include "tgvc/rng.hpp"

using namespace tgvc;

TEST_CASE("keypoint budget arithmetic") {
    BudgetConfig cfg;  // alpha = beta = 0.5, k_max = 15, score_norm = 1
    CHECK(keypoint_budget(1.0, 10, 10, cfg) == 15);           // saturating inputs clamp
    CHECK(keypoint_budget(0.0, 1, 10, cfg) == 1);             // round(0.05 * 15) = 1
    CHECK(keypoint_budget(0.5, 5, 10, cfg) == 8);             // round(7.5) rounds away from zero
    CHECK_THROWS_AS(keypoint_budget(1.0, 0, 10, cfg), InvalidInput);
    CHECK_THROWS_AS(keypoint_budget(1.0, 11, 10, cfg), InvalidInput);
}

TEST_CASE("keypoint budget properties") {
    Rng rng(100);
    for (int trial = 0; trial < 2000; ++trial) {
        BudgetConfig cfg;
        cfg.alpha = rng.uniform(0, 2);
        cfg.beta = rng.uniform(0, 2);
        cfg.k_max = 15;
        cfg.score_norm = rng.uniform(0.1, 10);
        std::size_t n_total = 1 + rng.uniform_index(5000);
        std::size_t n_i = 1 + rng.uniform_index(n_total);
        double s = rng.uniform(0, 20);

        int k = keypoint_budget(s, n_i, n_total, cfg);
        CHECK(k >= 1);
        CHECK(k <= cfg.k_max);
        // Monotone in the score and the population share.
        CHECK(keypoint_budget(s + 1.0, n_i, n_total, cfg) >= k);
        if (n_i < n_total) CHECK(keypoint_budget(s, n_i + 1, n_total, cfg) >= k);
    }
}

namespace {

std::vector<std::array<double, 6>> two_groups(std::size_t per_group, double sep,
                                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 6>> feats;
    for (std::size_t i = 0; i < 2 * per_group; ++i) {
        double cx = i < per_group ? 0.0 : sep;
        feats.push_back({cx + rng.normal(0, 0.05), rng.normal(0, 0.05), rng.normal(0, 0.05),
                         rng.normal(0, 0.05), rng.normal(0, 0.05), 0});
    }
    return feats;
}

// Exhaustive optimal 2-means over a small point set.
std::pair<double, std::vector<int>> brute_force_two_means(
    const std::vector<std::array<double, 6>>& pts) {
    const std::size_t n = pts.size();
    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<int> best_assign(n, 0);
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::array<double, 6> sum[2] = {{}, {}};
        std::size_t count[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            int g = (mask >> i) & 1;
            for (int d = 0; d < 6; ++d) sum[g][static_cast<std::size_t>(d)] += pts[i][static_cast<std::size_t>(d)];
            ++count[g];
        }
        if (!count[0] || !count[1]) continue;
        double sse = 0;
        for (std::size_t i = 0; i < n; ++i) {
            int g = (mask >> i) & 1;
            for (int d = 0; d < 6; ++d) {
                double diff = pts[i][static_cast<std::size_t>(d)] -
                              sum[g][static_cast<std::size_t>(d)] / static_cast<double>(count[g]);
                sse += diff * diff;
            }
        }
        if (sse < best_sse) {
            best_sse = sse;
            for (std::size_t i = 0; i < n; ++i) best_assign[i] = (mask >> i) & 1;
        }
    }
    return {best_sse, best_assign};
}

}  // namespace

TEST_CASE("kmeans_sample returns every member when k equals n") {
    auto feats = two_groups(4, 3.0, 5);
    auto rep = kmeans_sample(feats, static_cast<int>(feats.size()), 9);
    std::vector<std::size_t> all(feats.size());
    std::iota(all.begin(), all.end(), 0);
    CHECK(rep == all);

    // k above n clamps.
    CHECK(kmeans_sample(feats, 100, 9) == all);
}

TEST_CASE("kmeans_sample on identical members returns one of them") {
    std::vector<std::array<double, 6>> feats(7, {1, 2, 3, 4, 5, 6});
    auto rep = kmeans_sample(feats, 1, 3);
    REQUIRE(rep.size() == 1);
    CHECK(rep[0] < feats.size());
}

TEST_CASE("kmeans_sample splits two tight groups like optimal 2-means") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto feats = two_groups(5, 4.0, seed);  // 10 points
        auto [sse, assign] = brute_force_two_means(feats);
        (void)sse;
        auto rep = kmeans_sample(feats, 2, seed * 17);
        REQUIRE(rep.size() == 2);
        // One representative from each optimal group.
        CHECK(assign[rep[0]] != assign[rep[1]]);
        // Representatives are members.
        for (std::size_t r : rep) CHECK(r < feats.size());
    }
}

TEST_CASE("kmeans_sample is deterministic and a subset") {
    Rng rng(77);
    std::vector<std::array<double, 6>> feats;
    for (int i = 0; i < 40; ++i)
        feats.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(-5, 5),
                         rng.uniform(-5, 5), rng.uniform(0, 10), rng.uniform(0, 3)});
    auto a = kmeans_sample(feats, 7, 123);
    auto b = kmeans_sample(feats, 7, 123);
    CHECK(a == b);
    CHECK(a.size() == 7);
    std::set<std::size_t> distinct(a.begin(), a.end());
    CHECK(distinct.size() == 7);
    for (std::size_t r : a) CHECK(r < feats.size());
}

TEST_CASE("random_sample draws k distinct seeded indices") {
    auto a = random_sample(20, 5, 42);
    auto b = random_sample(20, 5, 42);
    CHECK(a == b);
    CHECK(a.size() == 5);
    std::set<std::size_t> distinct(a.begin(), a.end());
    CHECK(distinct.size() == 5);
    CHECK(random_sample(3, 10, 1) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("quantize_coord basics") {
    CHECK(quantize_coord(511.9, 8, 64) == 63);
    CHECK(quantize_coord(319.9, 8, 40) == 39);
    CHECK(quantize_coord(0, 8, 64) == 0);
    CHECK(quantize_coord(128.0, 8, 64) == 16);
    CHECK(quantize_coord(80.0, 8, 40) == 10);
    CHECK_THROWS_AS(quantize_coord(1.0, 0, 8), InvalidInput);
}

TEST_CASE("quantize is idempotent through cell centers") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        double x = rng.uniform(0, 512);
        std::uint16_t q = quantize_coord(x, 8, 64);
        double center = (q + 0.5) * 8;
        CHECK(quantize_coord(center, 8, 64) == q);
    }
}

TEST_CASE("quantize_trajectories groups instances and sets dims") {
    Trajectory t;
    t.xs = {0, 128, 511.9};
    t.ys = {0, 80, 319.9};
    t.vis = {1, 1, 0};
    std::vector<std::vector<const Trajectory*>> instances{{&t}, {&t, &t}};
    SparseTrajectorySet set = quantize_trajectories(instances, 512, 320, 8);
    CHECK(set.latent_w == 64);
    CHECK(set.latent_h == 40);
    CHECK(set.frame_count == 3);
    REQUIRE(set.instances.size() == 2);
    CHECK(set.instances[0].trajectories.size() == 1);
    CHECK(set.instances[1].trajectories.size() == 2);
    const SparseTrajectory& q = set.instances[0].trajectories[0];
    CHECK(q.points[0] == SparsePoint{0, 0});
    CHECK(q.points[1] == SparsePoint{16, 10});
    CHECK(q.points[2] == SparsePoint{63, 39});
    CHECK(q.vis == std::vector<std::uint8_t>{1, 1, 0});
}
