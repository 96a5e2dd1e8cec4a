#include "tgvc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tgvc/rng.hpp"

namespace tgvc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    std::istringstream ss(v);
    T out;
    ss >> out;
    if (ss.fail() || !ss.eof())
        throw InvalidInput("config key " + key + ": cannot parse value '" + v + "'");
    return out;
}

std::string sampling_name(SamplingMode m) {
    switch (m) {
        case SamplingMode::sparse: return "sparse";
        case SamplingMode::random: return "random";
        case SamplingMode::dense: return "dense";
    }
    return "sparse";
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "cut_threshold") cut_threshold = parse_num<double>(key, value);
    else if (key == "max_clip_len") max_clip_len = parse_num<int>(key, value);
    else if (key == "target_clip_len") target_clip_len = parse_num<int>(key, value);
    else if (key == "pool_grid") pool_grid = parse_num<int>(key, value);
    else if (key == "hist_bins") hist_bins = parse_num<int>(key, value);
    else if (key == "grid_size") grid_size = parse_num<int>(key, value);
    else if (key == "block_radius") block_radius = parse_num<int>(key, value);
    else if (key == "search_radius") search_radius = parse_num<int>(key, value);
    else if (key == "visibility_threshold") visibility_threshold = parse_num<double>(key, value);
    else if (key == "min_cluster_size") min_cluster_size = parse_num<int>(key, value);
    else if (key == "min_samples") min_samples = parse_num<int>(key, value);
    else if (key == "selection_threshold") selection_threshold = parse_num<double>(key, value);
    else if (key == "length_mode") {
        if (value == "path") length_mode = TrajectoryLengthMode::path_length;
        else if (value == "frames") length_mode = TrajectoryLengthMode::visible_frames;
        else throw InvalidInput("length_mode must be path or frames");
    } else if (key == "alpha") alpha = parse_num<double>(key, value);
    else if (key == "beta") beta = parse_num<double>(key, value);
    else if (key == "kmax") kmax = parse_num<int>(key, value);
    else if (key == "score_norm") score_norm = parse_num<double>(key, value);
    else if (key == "sampling") {
        if (value == "sparse") sampling = SamplingMode::sparse;
        else if (value == "random") sampling = SamplingMode::random;
        else if (value == "dense") sampling = SamplingMode::dense;
        else throw InvalidInput("sampling must be sparse, random or dense");
    } else if (key == "quant_factor") quant_factor = parse_num<int>(key, value);
    else if (key == "scale_coeff") scale_coeff = parse_num<double>(key, value);
    else if (key == "weight_mode") {
        if (value != "linear" && value != "uniform")
            throw InvalidInput("weight_mode must be linear or uniform");
        weight_mode = value;
    } else if (key == "steps") steps = parse_num<int>(key, value);
    else if (key == "seed") seed = parse_num<std::uint64_t>(key, value);
    else throw InvalidInput("unknown config key: " + key);
}

std::string PipelineConfig::canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "alpha=" << alpha << '\n'
        << "beta=" << beta << '\n'
        << "block_radius=" << block_radius << '\n'
        << "cut_threshold=" << cut_threshold << '\n'
        << "grid_size=" << grid_size << '\n'
        << "hist_bins=" << hist_bins << '\n'
        << "kmax=" << kmax << '\n'
        << "length_mode="
        << (length_mode == TrajectoryLengthMode::path_length ? "path" : "frames") << '\n'
        << "max_clip_len=" << max_clip_len << '\n'
        << "min_cluster_size=" << min_cluster_size << '\n'
        << "min_samples=" << min_samples << '\n'
        << "pool_grid=" << pool_grid << '\n'
        << "quant_factor=" << quant_factor << '\n'
        << "sampling=" << sampling_name(sampling) << '\n'
        << "scale_coeff=" << scale_coeff << '\n'
        << "score_norm=" << score_norm << '\n'
        << "search_radius=" << search_radius << '\n'
        << "seed=" << seed << '\n'
        << "selection_threshold=" << selection_threshold << '\n'
        << "steps=" << steps << '\n'
        << "target_clip_len=" << target_clip_len << '\n'
        << "visibility_threshold=" << visibility_threshold << '\n'
        << "weight_mode=" << weight_mode << '\n';
    return out.str();
}

std::uint64_t PipelineConfig::digest() const {
    // FNV-1a over the canonical serialization.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SegmentationConfig PipelineConfig::segmentation() const {
    return {cut_threshold, max_clip_len, target_clip_len};
}

SimilarityConfig PipelineConfig::similarity() const { return {pool_grid, hist_bins}; }

TrackerConfig PipelineConfig::tracker() const {
    return {grid_size, block_radius, search_radius, visibility_threshold};
}

ClusterConfig PipelineConfig::cluster(std::uint32_t width, std::uint32_t height) const {
    ClusterConfig c;
    c.min_cluster_size = min_cluster_size;
    c.min_samples = min_samples;
    c.feature_scales = default_feature_scales(width, height);
    return c;
}

BudgetConfig PipelineConfig::budget(double norm) const { return {alpha, beta, kmax, norm}; }

ClipResult process_clip(const Clip& clip, const PipelineConfig& cfg, std::uint64_t clip_seed,
                        const SimilarityProvider& provider) {
    ClipResult result;
    const Frame& first = clip.frames.front();
    TrackerConfig tracker_cfg = cfg.tracker();
    tracker_cfg.grid_size =
        std::min<int>(tracker_cfg.grid_size,
                      static_cast<int>(std::min(first.width, first.height)));

    TrajectorySet fwd = track_forward(clip, tracker_cfg);
    TrajectorySet bwd = track_backward(clip, tracker_cfg);
    TrajectorySet fused = fuse_bidirectional(fwd, bwd);

    // Degenerate trajectories (fewer than two visible points) stay out of the
    // feature list and end up as noise.
    std::vector<TrajectoryFeature> features;
    std::vector<std::size_t> feature_to_traj;
    for (std::size_t i = 0; i < fused.trajectories.size(); ++i) {
        try {
            features.push_back(trajectory_features(fused.trajectories[i]));
            feature_to_traj.push_back(i);
        } catch (const DegenerateTrajectory&) {
        }
    }

    ClusterResult clusters;
    if (features.size() >= static_cast<std::size_t>(cfg.min_cluster_size))
        clusters = cluster_instances(features, cfg.cluster(first.width, first.height),
                                     clip_seed);
    // Remap member indices from feature positions to fused-set positions.
    for (MotionInstance& inst : clusters.instances)
        for (std::size_t& m : inst.member_indices) m = feature_to_traj[m];

    const int latent_w = static_cast<int>((first.width + cfg.quant_factor - 1) / cfg.quant_factor);
    const int latent_h =
        static_cast<int>((first.height + cfg.quant_factor - 1) / cfg.quant_factor);

    std::vector<double> scores(clusters.instances.size(), 0.0);
    std::vector<double> intra(clusters.instances.size(), 0.0);
    for (std::size_t c = 0; c < clusters.instances.size(); ++c) {
        MotionInstance& inst = clusters.instances[c];
        inst.masks = instance_masks(inst, fused, latent_w, latent_h);
        intra[c] = intra_score(clip, inst, provider);
        scores[c] = inter_score(intra[c], inst, fused, cfg.length_mode);
    }

    ScoringConfig scoring{cfg.selection_threshold};
    std::vector<int> selected = cfg.sampling == SamplingMode::dense
                                    ? [&] {
                                          std::vector<int> all(clusters.instances.size());
                                          for (std::size_t i = 0; i < all.size(); ++i)
                                              all[i] = static_cast<int>(i);
                                          return all;
                                      }()
                                    : select_instances(scores, scoring);

    double norm = cfg.score_norm;
    if (norm <= 0) {
        for (int id : selected) norm = std::max(norm, scores[static_cast<std::size_t>(id)]);
        if (norm <= 0) norm = 1.0;
    }

    std::vector<std::vector<const Trajectory*>> per_instance;
    std::vector<int> k_of_instance(clusters.instances.size(), 0);
    for (int id : selected) {
        const MotionInstance& inst = clusters.instances[static_cast<std::size_t>(id)];
        std::vector<std::size_t> rep;
        if (cfg.sampling == SamplingMode::dense) {
            rep.resize(inst.size());
            for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = i;
        } else {
            int k = keypoint_budget(scores[static_cast<std::size_t>(id)], inst.size(),
                                    fused.trajectories.size(), cfg.budget(norm));
            std::uint64_t inst_seed = mix_seed(clip_seed, static_cast<std::uint64_t>(id) + 1);
            if (cfg.sampling == SamplingMode::random) {
                rep = random_sample(inst.size(), k, inst_seed);
            } else {
                std::vector<std::array<double, 6>> feats;
                feats.reserve(inst.size());
                auto scales = cfg.cluster(first.width, first.height).feature_scales;
                for (std::size_t m : inst.member_indices) {
                    auto v = trajectory_features(fused.trajectories[m]).vec();
                    for (std::size_t d = 0; d < 6; ++d) v[d] /= scales[d];
                    feats.push_back(v);
                }
                rep = kmeans_sample(feats, k, inst_seed);
            }
        }
        std::vector<const Trajectory*> members;
        for (std::size_t r : rep)
            members.push_back(&fused.trajectories[inst.member_indices[r]]);
        k_of_instance[static_cast<std::size_t>(id)] = static_cast<int>(members.size());
        per_instance.push_back(std::move(members));
    }

    result.sparse = quantize_trajectories(per_instance, first.width, first.height,
                                          cfg.quant_factor);
    result.sparse.frame_count = static_cast<std::uint16_t>(clip.length());
    result.stream = encode(result.sparse);

    for (std::size_t c = 0; c < clusters.instances.size(); ++c) {
        InstanceReport rep;
        rep.id = static_cast<int>(c);
        rep.members = clusters.instances[c].size();
        rep.s_intra = intra[c];
        rep.s_inter = scores[c];
        rep.selected = std::find(selected.begin(), selected.end(), static_cast<int>(c)) !=
                       selected.end();
        rep.k = k_of_instance[c];
        result.instances.push_back(rep);
    }
    return result;
}

EncodeResult encode_video(const std::vector<Frame>& video, const PipelineConfig& cfg, int jobs,
                          const std::string& embeddings_path) {
    if (video.size() < 2) throw InvalidInput("video needs at least 2 frames");
    for (const Frame& f : video) f.validate();

    FeatureSimilarity content_provider(cfg.similarity());
    std::unique_ptr<EmbeddingSimilarity> embedding_provider;
    if (!embeddings_path.empty()) {
        embedding_provider = std::make_unique<EmbeddingSimilarity>(
            EmbeddingSimilarity::load(embeddings_path));
        if (embedding_provider->frame_count() != video.size())
            throw InvalidInput("embedding file row count does not match the video");
    }
    const SimilarityProvider& keyframe_provider =
        embedding_provider ? static_cast<const SimilarityProvider&>(*embedding_provider)
                           : content_provider;

    EncodeResult out;
    out.width = video.front().width;
    out.height = video.front().height;
    out.channels = video.front().channels;
    out.total_frames = video.size();
    out.config_digest = cfg.digest();
    out.keyframes = select_keyframes(video, keyframe_provider, cfg.segmentation());

    std::vector<Clip> clips = segment_into_clips(video, out.keyframes, cfg.max_clip_len);
    out.clips.resize(clips.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= clips.size()) return;
            ClipResult r =
                process_clip(clips[i], cfg, mix_seed(cfg.seed, i), content_provider);
            r.index = i;
            r.first_frame = out.keyframes[i];
            r.last_frame = out.keyframes[i + 1];
            out.clips[i] = std::move(r);
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(clips.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::string manifest_json(const EncodeResult& result,
                          const std::vector<std::string>& stream_files) {
    nlohmann::json doc;
    doc["width"] = result.width;
    doc["height"] = result.height;
    doc["channels"] = result.channels;
    doc["frames"] = result.total_frames;
    {
        std::ostringstream hex;
        hex << std::hex << result.config_digest;
        doc["config_digest"] = hex.str();
    }
    doc["keyframes"] = result.keyframes;
    nlohmann::json clips = nlohmann::json::array();
    for (std::size_t i = 0; i < result.clips.size(); ++i) {
        const ClipResult& c = result.clips[i];
        nlohmann::json jc;
        jc["index"] = c.index;
        jc["first_frame"] = c.first_frame;
        jc["last_frame"] = c.last_frame;
        jc["keyframes"] = {c.first_frame, c.last_frame};
        jc["bytes"] = c.stream.size();
        jc["instances"] = c.instances.size();
        nlohmann::json ks = nlohmann::json::array();
        for (const InstanceReport& r : c.instances)
            if (r.selected) ks.push_back({{"id", r.id}, {"k", r.k}});
        jc["selected"] = std::move(ks);
        jc["file"] = i < stream_files.size() ? stream_files[i] : "";
        clips.push_back(std::move(jc));
    }
    doc["clips"] = std::move(clips);
    return doc.dump(2) + "\n";
}

}  // namespace tgvc
