#include <doctest.h>

#include <cmath>
#include <set>

#include "tgvc/ddim.hpp"
#include "tgvc/rng.hpp"
#include "tgvc/scenes.hpp"

using namespace tgvc;

TEST_CASE("cosine schedule shape") {
    DDIMSchedule s = make_schedule(10);
    REQUIRE(s.steps() == 10);
    CHECK(s.alpha_bar.front() > 0.99);
    for (int t = 0; t + 1 < 10; ++t) CHECK(s.alpha_bar[t] > s.alpha_bar[t + 1]);
    for (double v : s.alpha_bar) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
    DDIMSchedule deep = make_schedule(100);
    CHECK(deep.alpha_bar.back() >= 1e-4);
    CHECK_THROWS_AS(make_schedule(0), InvalidInput);
}

TEST_CASE("toy denoiser inverts its own mixture") {
    ToyDenoiser den;
    den.target = LatentSequence::zeros(16, 4, 4, 1);
    Rng rng(7);
    for (double& v : den.target.data) v = rng.uniform(-2, 2);

    LatentSequence noise = LatentSequence::zeros(16, 4, 4, 1);
    for (double& v : noise.data) v = rng.normal();

    double ab = 0.6;
    LatentSequence z = LatentSequence::zeros(16, 4, 4, 1);
    for (std::size_t i = 0; i < z.data.size(); ++i)
        z.data[i] = std::sqrt(ab) * den.target.data[i] + std::sqrt(1 - ab) * noise.data[i];

    LatentSequence eps = toy_eps(den, z, ab);
    for (std::size_t i = 0; i < eps.data.size(); ++i)
        CHECK(eps.data[i] == doctest::Approx(noise.data[i]).epsilon(1e-12));

    LatentSequence x0 = predict_x0(z, eps, ab);
    for (std::size_t i = 0; i < x0.data.size(); ++i)
        CHECK(x0.data[i] == doctest::Approx(den.target.data[i]).epsilon(1e-12));

    CHECK_THROWS_AS(toy_eps(den, z, 1.0), InvalidInput);
}

TEST_CASE("ddim_step endpoints") {
    Rng rng(12);
    LatentSequence z = LatentSequence::zeros(2, 4, 4, 1);
    for (double& v : z.data) v = rng.uniform(-1, 1);
    LatentSequence eps = LatentSequence::zeros(2, 4, 4, 1);
    for (double& v : eps.data) v = rng.uniform(-1, 1);

    // alpha_prev = alpha_t keeps a consistent state unchanged.
    double ab = 0.5;
    LatentSequence same = ddim_step(z, eps, ab, ab);
    LatentSequence x0 = predict_x0(z, eps, ab);
    for (std::size_t i = 0; i < z.data.size(); ++i)
        CHECK(same.data[i] == doctest::Approx(z.data[i]).epsilon(1e-12));

    // alpha_prev = 1 lands on the clean estimate.
    LatentSequence fin = ddim_step(z, eps, ab, 1.0);
    CHECK(fin.data == x0.data);
}

TEST_CASE("marker positions") {
    CHECK(marker_positions(16) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12,
                                                   13, 14, 15});
    CHECK(marker_positions(2) == std::vector<int>{0, 15});
    CHECK(marker_positions(10) == std::vector<int>{0, 2, 3, 5, 7, 8, 10, 12, 13, 15});
    for (int L = 2; L <= 16; ++L) {
        auto m = marker_positions(L);
        CHECK(m.front() == 0);
        CHECK(m.back() == 15);
        for (std::size_t k = 0; k + 1 < m.size(); ++k) CHECK(m[k] < m[k + 1]);
    }
    CHECK_THROWS_AS(marker_positions(17), InvalidInput);
    CHECK_THROWS_AS(marker_positions(1), InvalidInput);
}

namespace {

SparseTrajectorySet diagonal_set(int L, int grid = 16) {
    SparseTrajectorySet set;
    set.latent_w = static_cast<std::uint16_t>(grid);
    set.latent_h = static_cast<std::uint16_t>(grid);
    set.frame_count = static_cast<std::uint16_t>(L);
    SparseInstance inst;
    SparseTrajectory t;
    for (int f = 0; f < L; ++f) {
        auto v = static_cast<std::uint16_t>(f * (grid - 1) / std::max(1, L - 1));
        t.points.push_back({v, v});
        t.vis.push_back(1);
    }
    inst.trajectories.push_back(std::move(t));
    set.instances.push_back(std::move(inst));
    return set;
}

}  // namespace

TEST_CASE("interpolation pins marker frames to original points") {
    SparseTrajectorySet sparse = diagonal_set(10);
    auto [hat, markers] = interpolate_trajectories(sparse, 10);
    CHECK(hat.frame_count == 16);
    REQUIRE(markers.size() == 10);
    const SparseTrajectory& orig = sparse.instances[0].trajectories[0];
    const SparseTrajectory& interp = hat.instances[0].trajectories[0];
    for (int k = 0; k < 10; ++k) {
        CHECK(interp.points[static_cast<std::size_t>(markers[static_cast<std::size_t>(k)])] ==
              orig.points[static_cast<std::size_t>(k)]);
    }

    // L = 16 passes through unchanged.
    SparseTrajectorySet full = diagonal_set(16);
    auto [same, idm] = interpolate_trajectories(full, 16);
    CHECK(same == full);
    CHECK(idm == marker_positions(16));

    // L = 2: interior frames linearly interpolated.
    SparseTrajectorySet two = diagonal_set(2);
    auto [hat2, m2] = interpolate_trajectories(two, 2);
    CHECK(m2 == std::vector<int>{0, 15});
    const SparseTrajectory& t2 = hat2.instances[0].trajectories[0];
    CHECK(t2.points[0] == SparsePoint{0, 0});
    CHECK(t2.points[15] == SparsePoint{15, 15});
    CHECK(t2.points[8].x == 8);  // floor(15 * 8 / 15)
}

TEST_CASE("plan_generation stages") {
    GenerationPlan p16 = plan_generation(16);
    CHECK(p16.stages.size() == 1);

    GenerationPlan p21 = plan_generation(21);
    REQUIRE(p21.stages.size() == 2);
    CHECK(p21.stages[0].first_frame == 0);
    CHECK(p21.stages[0].last_frame == 11);
    CHECK(p21.stages[1].first_frame == 11);
    CHECK(p21.stages[1].last_frame == 20);
    CHECK(p21.stages[0].length() + p21.stages[1].length() - 1 == 21);

    GenerationPlan p30 = plan_generation(30);
    REQUIRE(p30.stages.size() == 2);
    CHECK(p30.stages[0].length() == 16);
    CHECK(p30.stages[1].length() == 15);

    CHECK_THROWS_AS(plan_generation(1), InvalidInput);
    CHECK_THROWS_AS(plan_generation(31), InvalidInput);
}

TEST_CASE("unguided sampling converges to the toy target") {
    ToyScene scene = make_scene("blob", 16);
    GenerationPlan plan = plan_generation(16);
    DDIMSchedule schedule = make_schedule(10);
    GuidanceConfig off;
    off.enabled = false;

    // Per-step interior error is non-increasing over the last five steps.
    std::vector<double> errors;
    auto observer = [&](int, int, const LatentSequence& z) {
        double err = 0;
        for (int f = 1; f < 15; ++f)
            for (std::size_t i = 0; i < z.frame_size(); ++i)
                err = std::max(err, std::fabs(z.frame(f)[i] -
                                              scene.denoiser.target.frame(f)[i]));
        errors.push_back(err);
    };
    LatentSequence out = generate_clip(scene.keys, scene.sparse, plan, schedule, off,
                                       scene.denoiser, 5, observer);
    REQUIRE(errors.size() == 10);
    for (std::size_t i = errors.size() - 5; i + 1 < errors.size(); ++i)
        CHECK(errors[i + 1] <= errors[i] + 1e-8);

    for (int f = 0; f < 16; ++f)
        for (std::size_t i = 0; i < out.frame_size(); ++i)
            CHECK(std::fabs(out.frame(f)[i] - scene.denoiser.target.frame(f)[i]) < 1e-6);
}

TEST_CASE("generation is deterministic per seed") {
    ToyScene scene = make_scene("shear", 12);
    GenerationPlan plan = plan_generation(12);
    DDIMSchedule schedule = make_schedule(10);
    GuidanceConfig cfg;
    LatentSequence a =
        generate_clip(scene.keys, scene.sparse, plan, schedule, cfg, scene.denoiser, 99);
    LatentSequence b =
        generate_clip(scene.keys, scene.sparse, plan, schedule, cfg, scene.denoiser, 99);
    CHECK(a.data == b.data);
    LatentSequence c =
        generate_clip(scene.keys, scene.sparse, plan, schedule, cfg, scene.denoiser, 100);
    CHECK(a.data != c.data);
}

TEST_CASE("every clip length emits exactly L frames") {
    DDIMSchedule schedule = make_schedule(5);
    GuidanceConfig cfg;
    for (int L = 2; L <= 30; ++L) {
        ToyScene scene = make_scene("blob", L);
        GenerationPlan plan = plan_generation(L);
        LatentSequence out = generate_clip(scene.keys, scene.sparse, plan, schedule, cfg,
                                           scene.denoiser, 7);
        CHECK(out.frames == L);
    }
}

TEST_CASE("zero-scale guidance is bit-identical to a bypassed module") {
    ToyScene scene = make_scene("two-blob", 16);
    GenerationPlan plan = plan_generation(16);
    DDIMSchedule schedule = make_schedule(10);

    GuidanceConfig zero;
    zero.scale_coeff = 0.0;
    GuidanceConfig bypass;
    bypass.enabled = false;
    for (std::uint64_t seed : {1, 2, 3}) {
        LatentSequence a = generate_clip(scene.keys, scene.sparse, plan, schedule, zero,
                                         scene.denoiser, seed);
        LatentSequence b = generate_clip(scene.keys, scene.sparse, plan, schedule, bypass,
                                         scene.denoiser, seed);
        CHECK(a.data == b.data);
    }
}

TEST_CASE("guidance pulls the two-blob scene toward the trajectories") {
    ToyScene scene = make_scene("two-blob", 16);
    GenerationPlan plan = plan_generation(16);
    DDIMSchedule schedule = make_schedule(10);
    GuidanceConfig on;   // scale 30
    GuidanceConfig off;
    off.enabled = false;

    LatentSequence guided =
        generate_clip(scene.keys, scene.sparse, plan, schedule, on, scene.denoiser, 3);
    LatentSequence unguided =
        generate_clip(scene.keys, scene.sparse, plan, schedule, off, scene.denoiser, 3);
    double m_on = trajectory_misalignment(guided, scene.sparse);
    double m_off = trajectory_misalignment(unguided, scene.sparse);
    CHECK(m_on < m_off);
}
