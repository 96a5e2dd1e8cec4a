#include "tgvc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tgvc {

namespace {

double luma(const Frame& f, std::uint32_t x, std::uint32_t y) {
    if (f.channels == 1) return f.at(x, y, 0);
    return 0.299 * f.at(x, y, 0) + 0.587 * f.at(x, y, 1) + 0.114 * f.at(x, y, 2);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    double s = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(s, 0.0, 1.0);
}

}  // namespace

std::vector<double> FeatureSimilarity::features(const Frame& f) const {
    const int grid = std::max(1, cfg_.pool_grid);
    const int bins = std::max(2, cfg_.hist_bins);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(grid) * grid + static_cast<std::size_t>(bins) * f.channels);

    // Mean-pooled grayscale, scaled to [0, 1].
    for (int gy = 0; gy < grid; ++gy) {
        std::uint32_t y0 = static_cast<std::uint32_t>(static_cast<std::uint64_t>(gy) * f.height / grid);
        std::uint32_t y1 = static_cast<std::uint32_t>(static_cast<std::uint64_t>(gy + 1) * f.height / grid);
        for (int gx = 0; gx < grid; ++gx) {
            std::uint32_t x0 = static_cast<std::uint32_t>(static_cast<std::uint64_t>(gx) * f.width / grid);
            std::uint32_t x1 = static_cast<std::uint32_t>(static_cast<std::uint64_t>(gx + 1) * f.width / grid);
            double sum = 0;
            std::size_t count = 0;
            for (std::uint32_t y = y0; y < y1; ++y)
                for (std::uint32_t x = x0; x < x1; ++x) {
                    sum += luma(f, x, y);
                    ++count;
                }
            v.push_back(count ? sum / (255.0 * static_cast<double>(count)) : 0.0);
        }
    }

    // Per-channel histogram as frequencies.
    const double inv_total = 1.0 / (static_cast<double>(f.width) * f.height);
    for (std::uint32_t c = 0; c < f.channels; ++c) {
        std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
        for (std::uint32_t y = 0; y < f.height; ++y)
            for (std::uint32_t x = 0; x < f.width; ++x)
                hist[static_cast<std::size_t>(f.at(x, y, c)) * bins / 256] += 1.0;
        for (double& h : hist) v.push_back(h * inv_total);
    }
    return v;
}

double FeatureSimilarity::score(const Frame& a, const Frame& b) const {
    return cosine(features(a), features(b));
}

EmbeddingSimilarity::EmbeddingSimilarity(std::vector<std::vector<double>> embeddings,
                                         SimilarityConfig fallback_cfg)
    : embeddings_(std::move(embeddings)), fallback_(fallback_cfg) {
    for (auto& e : embeddings_) {
        double n = 0;
        for (double x : e) n += x * x;
        if (n <= 0.0) throw InvalidInput("embedding vector has zero norm");
        n = std::sqrt(n);
        for (double& x : e) x /= n;
    }
}

EmbeddingSimilarity EmbeddingSimilarity::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open embedding file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        double x;
        while (ss >> x) row.push_back(x);
        if (!ss.eof())
            throw ParseError("embedding file line " + std::to_string(lineno) +
                             ": non-numeric token");
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("embedding file line " + std::to_string(lineno) +
                             ": dimension mismatch");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("embedding file is empty");
    return EmbeddingSimilarity(std::move(rows));
}

double EmbeddingSimilarity::score_indexed(const std::vector<Frame>& video, std::size_t i,
                                          std::size_t j) const {
    if (i >= embeddings_.size() || j >= embeddings_.size())
        throw InvalidInput("frame index outside the embedding table");
    (void)video;
    double dot = 0;
    const auto& a = embeddings_[i];
    const auto& b = embeddings_[j];
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    return std::clamp(dot, 0.0, 1.0);
}

double frame_similarity(const SimilarityProvider& provider, const Frame& a, const Frame& b) {
    if (!a.same_shape(b)) throw InvalidInput("frame dimension mismatch");
    return provider.score(a, b);
}

}  // namespace tgvc
