// Command-line front end: encode raw clips to trajectory bitstreams, decode
// and inspect them, run the guided sampling simulator, check the guidance
// gradient, and report rates.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tgvc/bitstream.hpp"
#include "tgvc/ddim.hpp"
#include "tgvc/pipeline.hpp"
#include "tgvc/rng.hpp"
#include "tgvc/scenes.hpp"

namespace fs = std::filesystem;
using namespace tgvc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string& s = ss.str();
    return {s.begin(), s.end()};
}

void write_bytes_atomic(const std::string& path, const void* data, std::size_t size) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot open output file: " + tmp);
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw InvalidInput("short write to " + tmp);
    }
    fs::rename(tmp, path);
}

struct EncodeArgs {
    std::string input;
    std::uint32_t width = 0, height = 0, channels = 1;
    std::string config_file;
    std::string out_dir = ".";
    std::string embeddings;
    int jobs = 1;
    std::vector<std::string> overrides;
    bool inspect_only = false;
};

PipelineConfig load_config(const EncodeArgs& args) {
    PipelineConfig cfg;
    if (!args.config_file.empty()) cfg = PipelineConfig::from_file(args.config_file);
    for (const std::string& kv : args.overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void print_instance_table(const EncodeResult& result) {
    for (const ClipResult& c : result.clips) {
        std::printf("clip %zu: frames [%zu, %zu], %zu bytes\n", c.index, c.first_frame,
                    c.last_frame, c.stream.size());
        std::printf("  %-4s %-6s %-12s %-12s %-9s %s\n", "id", "N", "S_intra", "S_inter",
                    "selected", "K");
        for (const InstanceReport& r : c.instances)
            std::printf("  %-4d %-6zu %-12.6g %-12.6g %-9s %d\n", r.id, r.members, r.s_intra,
                        r.s_inter, r.selected ? "yes" : "no", r.k);
    }
}

int run_encode(const EncodeArgs& args) {
    PipelineConfig cfg = load_config(args);
    std::vector<Frame> video = load_raw_video(args.input, args.width, args.height,
                                              args.channels);
    EncodeResult result = encode_video(video, cfg, args.jobs, args.embeddings);

    if (args.inspect_only) {
        print_instance_table(result);
        return kExitOk;
    }

    fs::create_directories(args.out_dir);
    std::vector<std::string> files;
    for (const ClipResult& c : result.clips) {
        char name[32];
        std::snprintf(name, sizeof name, "clip_%03zu.tgvc", c.index);
        files.emplace_back(name);
        write_bytes_atomic((fs::path(args.out_dir) / name).string(), c.stream.data(),
                           c.stream.size());
    }
    std::string manifest = manifest_json(result, files);
    write_bytes_atomic((fs::path(args.out_dir) / "manifest.json").string(), manifest.data(),
                       manifest.size());
    std::printf("encoded %zu clips, %zu keyframes, manifest at %s\n", result.clips.size(),
                result.keyframes.size(), (fs::path(args.out_dir) / "manifest.json").c_str());
    return kExitOk;
}

int run_decode(const std::string& input, const std::string& output) {
    SparseTrajectorySet set = decode(read_bytes(input));
    TrajectorySet tracks;
    tracks.frame_count = set.frame_count;
    tracks.grid_size = 0;  // not grid-seeded; origin carries (instance, member)
    tracks.width = set.latent_w;
    tracks.height = set.latent_h;
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
        const SparseInstance& inst = set.instances[i];
        for (std::size_t j = 0; j < inst.trajectories.size(); ++j) {
            const SparseTrajectory& st = inst.trajectories[j];
            Trajectory t;
            t.origin_row = static_cast<int>(i);
            t.origin_col = static_cast<int>(j);
            for (std::size_t f = 0; f < st.points.size(); ++f) {
                t.xs.push_back(st.points[f].x);
                t.ys.push_back(st.points[f].y);
                t.vis.push_back(st.vis[f]);
            }
            tracks.trajectories.push_back(std::move(t));
        }
    }
    std::string json = tracks_to_json(tracks);
    if (output.empty() || output == "-") {
        std::fwrite(json.data(), 1, json.size(), stdout);
    } else {
        write_bytes_atomic(output, json.data(), json.size());
    }
    return kExitOk;
}

int run_simulate(const std::string& scene_name, int frames, int steps, double scale,
                 std::uint64_t seed, const std::string& weight_mode, const std::string& out) {
    ToyScene scene = make_scene(scene_name, frames);
    GenerationPlan plan = plan_generation(frames);
    DDIMSchedule schedule = make_schedule(steps);

    GuidanceConfig cfg;
    cfg.scale_coeff = scale;
    cfg.weight_mode = weight_mode == "uniform" ? WeightMode::uniform : WeightMode::linear;

    GuidanceConfig off = cfg;
    off.enabled = false;
    LatentSequence unguided =
        generate_clip(scene.keys, scene.sparse, plan, schedule, off, scene.denoiser, seed);
    LatentSequence guided =
        generate_clip(scene.keys, scene.sparse, plan, schedule, cfg, scene.denoiser, seed);

    double mis_before = trajectory_misalignment(unguided, scene.sparse, cfg.weight_mode);
    double mis_after = trajectory_misalignment(guided, scene.sparse, cfg.weight_mode);
    std::printf("misalignment unguided %.17g guided %.17g\n", mis_before, mis_after);

    if (!out.empty()) {
        // Raw tensor dump: u16 L, latent_h, latent_w, C, then f32 LE,
        // frame-major, row-major, channel-interleaved.
        std::vector<std::uint8_t> bytes;
        auto put_u16 = [&](std::uint16_t v) {
            bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
            bytes.push_back(static_cast<std::uint8_t>(v >> 8));
        };
        put_u16(static_cast<std::uint16_t>(guided.frames));
        put_u16(static_cast<std::uint16_t>(guided.height));
        put_u16(static_cast<std::uint16_t>(guided.width));
        put_u16(static_cast<std::uint16_t>(guided.channels));
        for (double v : guided.data) {
            float fv = static_cast<float>(v);
            std::uint32_t u;
            static_assert(sizeof u == sizeof fv);
            std::memcpy(&u, &fv, 4);
            for (int b = 0; b < 4; ++b)
                bytes.push_back(static_cast<std::uint8_t>((u >> (8 * b)) & 0xFF));
        }
        write_bytes_atomic(out, bytes.data(), bytes.size());
    }
    return kExitOk;
}

// Latent draws land on a 1/8 lattice, so every compared feature difference is
// either exactly zero (where both the analytic gradient and a symmetric
// difference vanish) or at least sqrt(2)/8, far outside the h = 1e-4 stencil.
// That keeps the central differences away from the L1 kinks.
void lattice_fill(LatentSequence& z, Rng& rng) {
    for (double& v : z.data)
        v = (static_cast<double>(rng.uniform_index(25)) - 12.0) / 8.0;
}

struct GradCheckReport {
    double max_rel_err = 0;
    std::vector<double> per_frame;
};

GradCheckReport gradcheck_case(int L, int h_dim, int w_dim, int c_dim, std::uint64_t seed) {
    Rng rng(seed);
    LatentSequence z = LatentSequence::zeros(L, h_dim, w_dim, c_dim);
    LatentSequence eps = LatentSequence::zeros(L, h_dim, w_dim, c_dim);
    lattice_fill(z, rng);
    lattice_fill(eps, rng);
    const double alpha_bar = 0.5;  // sqrt((1-a)/a) = 1 keeps lattice differences exact

    SparseTrajectorySet sparse;
    sparse.latent_w = static_cast<std::uint16_t>(w_dim);
    sparse.latent_h = static_cast<std::uint16_t>(h_dim);
    sparse.frame_count = static_cast<std::uint16_t>(L);
    int n_instances = 1 + static_cast<int>(rng.uniform_index(2));
    for (int i = 0; i < n_instances; ++i) {
        SparseInstance inst;
        int n_traj = 1 + static_cast<int>(rng.uniform_index(2));
        for (int t = 0; t < n_traj; ++t) {
            SparseTrajectory tr;
            for (int f = 0; f < L; ++f) {
                tr.points.push_back(
                    {static_cast<std::uint16_t>(rng.uniform_index(static_cast<std::uint64_t>(w_dim))),
                     static_cast<std::uint16_t>(rng.uniform_index(static_cast<std::uint64_t>(h_dim)))});
                tr.vis.push_back(rng.uniform() < 0.85 ? 1 : 0);
            }
            inst.trajectories.push_back(std::move(tr));
        }
        sparse.instances.push_back(std::move(inst));
    }

    GuidanceConfig cfg;
    cfg.weight_mode = rng.uniform() < 0.5 ? WeightMode::linear : WeightMode::uniform;

    LatentSequence analytic = grad_Lm(z, eps, alpha_bar, sparse, cfg);

    GradCheckReport rep;
    rep.per_frame.assign(static_cast<std::size_t>(L), 0.0);
    const double h = 1e-4;
    for (std::size_t i = 0; i < z.data.size(); ++i) {
        double keep = z.data[i];
        z.data[i] = keep + h;
        double up = loss_Lm(predict_x0(z, eps, alpha_bar), sparse, cfg);
        z.data[i] = keep - h;
        double dn = loss_Lm(predict_x0(z, eps, alpha_bar), sparse, cfg);
        z.data[i] = keep;
        double fd = (up - dn) / (2 * h);
        double ga = analytic.data[i];
        // Roundoff through the difference stencil is ~1e-10 while any true
        // slope component is >= 0.2; differences under 1e-8 are zero.
        double denom = std::max({std::fabs(fd), std::fabs(ga), 1e-12});
        double rel = std::fabs(fd - ga) < 1e-8 ? 0.0 : std::fabs(fd - ga) / denom;
        int frame = static_cast<int>(i / z.frame_size());
        rep.per_frame[static_cast<std::size_t>(frame)] =
            std::max(rep.per_frame[static_cast<std::size_t>(frame)], rel);
        rep.max_rel_err = std::max(rep.max_rel_err, rel);
    }
    return rep;
}

int run_gradcheck(std::uint64_t seed, const std::string& dims, int cases) {
    int L = 6, hd = 4, wd = 4, cd = 2;
    if (!dims.empty()) {
        if (std::sscanf(dims.c_str(), "%dx%dx%dx%d", &L, &hd, &wd, &cd) != 4)
            throw InvalidInput("--dims expects LxHxWxC");
        if (L < 3 || hd < 1 || wd < 1 || cd < 1) throw InvalidInput("--dims values out of range");
    }
    double worst = 0;
    std::vector<double> per_frame(static_cast<std::size_t>(L), 0.0);
    for (int r = 0; r < cases; ++r) {
        GradCheckReport rep = gradcheck_case(L, hd, wd, cd, mix_seed(seed, static_cast<std::uint64_t>(r)));
        worst = std::max(worst, rep.max_rel_err);
        for (int f = 0; f < L; ++f)
            per_frame[static_cast<std::size_t>(f)] =
                std::max(per_frame[static_cast<std::size_t>(f)], rep.per_frame[static_cast<std::size_t>(f)]);
    }
    std::printf("gradcheck: %d cases, dims %dx%dx%dx%d\n", cases, L, hd, wd, cd);
    for (int f = 0; f < L; ++f)
        std::printf("  frame %d max relative error %.3e\n", f, per_frame[static_cast<std::size_t>(f)]);
    std::printf("max relative error %.3e\n", worst);
    if (worst > 1e-4) {
        std::fprintf(stderr, "gradcheck FAILED: %.3e > 1e-4\n", worst);
        return kExitInternal;
    }
    return kExitOk;
}

int run_metrics(const std::string& manifest_path, std::uint64_t keyframe_bits) {
    std::ifstream in(manifest_path);
    if (!in) throw InvalidInput("cannot open manifest: " + manifest_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    std::uint32_t width = doc.at("width").get<std::uint32_t>();
    std::uint32_t height = doc.at("height").get<std::uint32_t>();
    std::uint32_t frames = doc.at("frames").get<std::uint32_t>();

    std::uint64_t total_motion_bits = 0;
    std::printf("%-6s %-14s %-12s\n", "clip", "frames", "motion_bits");
    for (const auto& jc : doc.at("clips")) {
        std::uint64_t bits = jc.at("bytes").get<std::uint64_t>() * 8;
        total_motion_bits += bits;
        std::printf("%-6" PRIu64 " [%" PRIu64 ", %" PRIu64 "]      %-12" PRIu64 "\n",
                    jc.at("index").get<std::uint64_t>(), jc.at("first_frame").get<std::uint64_t>(),
                    jc.at("last_frame").get<std::uint64_t>(), bits);
    }
    RateReport rep = rate_report(static_cast<std::size_t>(total_motion_bits / 8), width, height,
                                 frames, keyframe_bits);
    std::printf("total motion_bits %" PRIu64 "\n", total_motion_bits);
    std::printf("bpp_with_motion %.17g\n", rep.bpp_with_motion);
    std::printf("bpp_without_motion %.17g\n", rep.bpp_without_motion);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajectory-guided generative video codec tools"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto add_encode_opts = [&](CLI::App* cmd) {
        cmd->add_option("--input", enc.input, "raw video file")->required();
        cmd->add_option("--width", enc.width, "frame width")->required();
        cmd->add_option("--height", enc.height, "frame height")->required();
        cmd->add_option("--channels", enc.channels, "1 or 3");
        cmd->add_option("--config", enc.config_file, "flat key=value config file");
        cmd->add_option("--embeddings", enc.embeddings, "per-frame embedding file");
        cmd->add_option("--jobs", enc.jobs, "concurrent clips");
        cmd->add_option("--set", enc.overrides, "override config key=value")->take_all();
        cmd->add_option_function<int>("--kmax", [&](int v) {
            enc.overrides.push_back("kmax=" + std::to_string(v));
        });
        cmd->add_option_function<double>("--alpha", [&](double v) {
            enc.overrides.push_back("alpha=" + std::to_string(v));
        });
        cmd->add_option_function<double>("--beta", [&](double v) {
            enc.overrides.push_back("beta=" + std::to_string(v));
        });
        cmd->add_option_function<std::string>("--sampling", [&](const std::string& v) {
            enc.overrides.push_back("sampling=" + v);
        })->check(CLI::IsMember({"sparse", "random", "dense"}));
        cmd->add_option_function<int>("--grid", [&](int v) {
            enc.overrides.push_back("grid_size=" + std::to_string(v));
        });
        cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) {
            enc.overrides.push_back("seed=" + std::to_string(v));
        });
    };

    CLI::App* cmd_encode = app.add_subcommand("encode", "encode a raw video to bitstreams");
    add_encode_opts(cmd_encode);
    cmd_encode->add_option("--out-dir", enc.out_dir, "output directory");

    CLI::App* cmd_inspect =
        app.add_subcommand("inspect", "print per-instance scores without writing streams");
    add_encode_opts(cmd_inspect);

    std::string dec_input, dec_output;
    CLI::App* cmd_decode = app.add_subcommand("decode", "decode a bitstream to track JSON");
    cmd_decode->add_option("--input", dec_input, "bitstream file")->required();
    cmd_decode->add_option("--out", dec_output, "output track file (default stdout)");

    std::string sim_scene = "blob";
    int sim_frames = 16, sim_steps = 10;
    double sim_scale = 30.0;
    std::uint64_t sim_seed = 0;
    std::string sim_weight = "linear", sim_out;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "run the guided DDIM simulator");
    cmd_sim->add_option("--scene", sim_scene, "blob, two-blob or shear")
        ->check(CLI::IsMember({"blob", "two-blob", "shear"}));
    cmd_sim->add_option("--frames", sim_frames, "clip length L in [2, 30]");
    cmd_sim->add_option("--steps", sim_steps, "DDIM steps");
    cmd_sim->add_option("--scale", sim_scale, "guidance scale coefficient");
    cmd_sim->add_option("--seed", sim_seed, "noise seed");
    cmd_sim->add_option("--weight-mode", sim_weight, "linear or uniform")
        ->check(CLI::IsMember({"linear", "uniform"}));
    cmd_sim->add_option("--out", sim_out, "raw tensor dump file");

    std::uint64_t gc_seed = 0;
    std::string gc_dims;
    int gc_cases = 50;
    CLI::App* cmd_gc = app.add_subcommand("gradcheck", "guidance gradient vs finite differences");
    cmd_gc->add_option("--seed", gc_seed, "base seed");
    cmd_gc->add_option("--dims", gc_dims, "LxHxWxC (default 6x4x4x2)");
    cmd_gc->add_option("--cases", gc_cases, "number of random configurations");

    std::string met_manifest;
    std::uint64_t met_kf_bits = 0;
    CLI::App* cmd_met = app.add_subcommand("metrics", "rate report from a manifest");
    cmd_met->add_option("--manifest", met_manifest, "manifest.json path")->required();
    cmd_met->add_option("--keyframe-bits", met_kf_bits,
                        "externally supplied total keyframe bits");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_encode->parsed()) return run_encode(enc);
        if (cmd_inspect->parsed()) {
            enc.inspect_only = true;
            return run_encode(enc);
        }
        if (cmd_decode->parsed()) return run_decode(dec_input, dec_output);
        if (cmd_sim->parsed())
            return run_simulate(sim_scene, sim_frames, sim_steps, sim_scale, sim_seed,
                                sim_weight, sim_out);
        if (cmd_gc->parsed()) return run_gradcheck(gc_seed, gc_dims, gc_cases);
        if (cmd_met->parsed()) return run_metrics(met_manifest, met_kf_bits);
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const TruncationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const CorruptStream& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const EncodeRangeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const SpanTooLong& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitOk;
}
