#include "tgvc/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tgvc/errors.hpp"

namespace tgvc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// lambda values are 1/distance; identical points separate at +inf. Subtracting
// two infinite lambdas means "never apart", which contributes nothing.
double lambda_diff(double lo, double hi) {
    if (std::isinf(hi) && std::isinf(lo)) return 0.0;
    return hi - lo;
}

struct DendroNode {
    int left;   // node id (< n: leaf / point)
    int right;
    double dist;
    std::size_t size;
};

struct CondensedCluster {
    int parent = -1;
    double birth_lambda = 0.0;
    std::size_t subtree_points = 0;
    std::vector<int> children;
    std::vector<std::pair<int, double>> fallouts;  // (point, lambda at exit)
};

}  // namespace

std::vector<int> hdbscan_labels(const double* pts, std::size_t n, std::size_t dim,
                                const HdbscanParams& params) {
    const std::size_t mcs = static_cast<std::size_t>(std::max(2, params.min_cluster_size));
    const std::size_t ms = static_cast<std::size_t>(std::max(1, params.min_samples));
    if (n == 0) return {};
    if (n == 1) return {-1};

    // Core distances: distance to the ms-th nearest other point.
    std::vector<double> core(n);
    {
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) row[j] = sq_dist(pts + i * dim, pts + j * dim, dim);
            row[i] = kInf;  // drop self
            std::size_t k = std::min(ms, n - 1) - 1;
            std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k),
                             row.end());
            core[i] = std::sqrt(row[k]);
        }
    }

    // Prim MST on mutual reachability distance, ties to the lowest index.
    std::vector<double> best(n, kInf);
    std::vector<int> parent(n, -1);
    std::vector<char> in_tree(n, 0);
    std::vector<std::pair<int, int>> edge_ends;  // (a, b) with weight in edge_w
    std::vector<double> edge_w;
    edge_ends.reserve(n - 1);
    edge_w.reserve(n - 1);

    int current = 0;
    in_tree[0] = 1;
    for (std::size_t added = 1; added < n; ++added) {
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            double d = std::sqrt(sq_dist(pts + current * dim, pts + j * dim, dim));
            double mrd = std::max({core[static_cast<std::size_t>(current)], core[j], d});
            if (mrd < best[j]) {
                best[j] = mrd;
                parent[j] = current;
            }
        }
        int next = -1;
        double next_w = kInf;
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            if (best[j] < next_w) {
                next_w = best[j];
                next = static_cast<int>(j);
            }
        }
        in_tree[static_cast<std::size_t>(next)] = 1;
        edge_ends.emplace_back(parent[static_cast<std::size_t>(next)], next);
        edge_w.push_back(next_w);
        current = next;
    }

    // Single-linkage hierarchy: merge edges in weight order.
    std::vector<std::size_t> order(edge_w.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (edge_w[a] != edge_w[b]) return edge_w[a] < edge_w[b];
        return edge_ends[a] < edge_ends[b];
    });

    std::vector<int> dsu(n);
    std::iota(dsu.begin(), dsu.end(), 0);
    auto find = [&](int x) {
        while (dsu[static_cast<std::size_t>(x)] != x) {
            dsu[static_cast<std::size_t>(x)] = dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
            x = dsu[static_cast<std::size_t>(x)];
        }
        return x;
    };

    std::vector<DendroNode> nodes;  // merge k creates node id n + k
    nodes.reserve(n - 1);
    std::vector<int> node_of(n);  // dendrogram node currently rooted at DSU root
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<std::size_t> size_of(n, 1);

    for (std::size_t e : order) {
        int ra = find(edge_ends[e].first);
        int rb = find(edge_ends[e].second);
        DendroNode nd{node_of[static_cast<std::size_t>(ra)], node_of[static_cast<std::size_t>(rb)],
                      edge_w[e], size_of[static_cast<std::size_t>(ra)] + size_of[static_cast<std::size_t>(rb)]};
        dsu[static_cast<std::size_t>(rb)] = ra;
        node_of[static_cast<std::size_t>(ra)] = static_cast<int>(n + nodes.size());
        size_of[static_cast<std::size_t>(ra)] = nd.size;
        nodes.push_back(nd);
    }

    auto node_size = [&](int id) {
        return id < static_cast<int>(n) ? std::size_t{1}
                                        : nodes[static_cast<std::size_t>(id) - n].size;
    };
    auto collect_leaves = [&](int id, std::vector<int>& out) {
        std::vector<int> stack{id};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v < static_cast<int>(n)) {
                out.push_back(v);
            } else {
                const DendroNode& nd = nodes[static_cast<std::size_t>(v) - n];
                stack.push_back(nd.left);
                stack.push_back(nd.right);
            }
        }
    };

    // Condense: keep only splits where both sides reach min_cluster_size.
    std::vector<CondensedCluster> clusters(1);
    clusters[0].subtree_points = n;
    std::vector<std::pair<int, int>> stack{{static_cast<int>(n + nodes.size() - 1), 0}};
    std::vector<int> scratch;
    while (!stack.empty()) {
        auto [node_id, cl] = stack.back();
        stack.pop_back();
        const DendroNode& nd = nodes[static_cast<std::size_t>(node_id) - n];
        double lam = nd.dist > 0.0 ? 1.0 / nd.dist : kInf;
        std::size_t ls = node_size(nd.left);
        std::size_t rs = node_size(nd.right);
        bool lk = ls >= mcs;
        bool rk = rs >= mcs;
        if (lk && rk) {
            for (int child_node : {nd.left, nd.right}) {
                int child = static_cast<int>(clusters.size());
                clusters.push_back({});
                clusters[static_cast<std::size_t>(child)].parent = cl;
                clusters[static_cast<std::size_t>(child)].birth_lambda = lam;
                clusters[static_cast<std::size_t>(child)].subtree_points = node_size(child_node);
                clusters[static_cast<std::size_t>(cl)].children.push_back(child);
                stack.emplace_back(child_node, child);
            }
        } else if (lk || rk) {
            int keep = lk ? nd.left : nd.right;
            int drop = lk ? nd.right : nd.left;
            scratch.clear();
            collect_leaves(drop, scratch);
            std::sort(scratch.begin(), scratch.end());
            for (int p : scratch)
                clusters[static_cast<std::size_t>(cl)].fallouts.emplace_back(p, lam);
            stack.emplace_back(keep, cl);
        } else {
            scratch.clear();
            collect_leaves(node_id, scratch);
            std::sort(scratch.begin(), scratch.end());
            for (int p : scratch)
                clusters[static_cast<std::size_t>(cl)].fallouts.emplace_back(p, lam);
        }
    }

    // Stability and excess-of-mass selection (children processed first since
    // clusters were created top-down).
    const std::size_t nc = clusters.size();
    std::vector<double> stability(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const CondensedCluster& cl = clusters[c];
        double s = 0.0;
        for (const auto& [p, lam] : cl.fallouts) s += lambda_diff(cl.birth_lambda, lam);
        for (int ch : cl.children)
            s += static_cast<double>(clusters[static_cast<std::size_t>(ch)].subtree_points) *
                 lambda_diff(cl.birth_lambda,
                             clusters[static_cast<std::size_t>(ch)].birth_lambda);
        stability[c] = s;
    }

    std::vector<char> tentative(nc, 0);
    std::vector<double> s_hat(nc, 0.0);
    for (std::size_t ci = nc; ci-- > 0;) {
        const CondensedCluster& cl = clusters[ci];
        if (cl.children.empty()) {
            tentative[ci] = 1;
            s_hat[ci] = stability[ci];
            continue;
        }
        double child_sum = 0.0;
        for (int ch : cl.children) child_sum += s_hat[static_cast<std::size_t>(ch)];
        if (stability[ci] > child_sum) {
            tentative[ci] = 1;
            s_hat[ci] = stability[ci];
        } else {
            s_hat[ci] = child_sum;
        }
    }
    tentative[0] = 0;  // root is not an ordinary cluster

    // Final selection: tentative clusters with no tentative ancestor.
    std::vector<char> selected(nc, 0);
    for (std::size_t c = 1; c < nc; ++c) {
        if (!tentative[c]) continue;
        bool shadowed = false;
        for (int a = clusters[c].parent; a > 0; a = clusters[static_cast<std::size_t>(a)].parent)
            if (tentative[static_cast<std::size_t>(a)]) {
                shadowed = true;
                break;
            }
        selected[c] = shadowed ? 0 : 1;
    }

    std::vector<int> labels(n, -1);
    bool any_selected = false;
    for (std::size_t c = 1; c < nc; ++c) any_selected |= selected[c] != 0;

    if (!any_selected && clusters[0].children.empty()) {
        // Degenerate root: a clump of mutually-identical points never splits.
        std::size_t zero_dist = 0;
        for (const auto& [p, lam] : clusters[0].fallouts) zero_dist += std::isinf(lam) ? 1u : 0u;
        if (zero_dist >= mcs) {
            for (const auto& [p, lam] : clusters[0].fallouts)
                if (std::isinf(lam)) labels[static_cast<std::size_t>(p)] = 0;
            return labels;
        }
        return labels;
    }

    // Points belong to the selected cluster whose subtree they fall out of.
    std::vector<int> owner(n, -1);
    for (std::size_t c = 0; c < nc; ++c)
        for (const auto& [p, lam] : clusters[c].fallouts) owner[static_cast<std::size_t>(p)] = static_cast<int>(c);
    std::vector<int> chosen(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        for (int c = owner[p]; c > 0; c = clusters[static_cast<std::size_t>(c)].parent) {
            if (selected[static_cast<std::size_t>(c)]) {
                chosen[p] = c;
                break;
            }
        }
    }

    // Number clusters by their smallest member index.
    std::vector<int> first_member(nc, std::numeric_limits<int>::max());
    for (std::size_t p = 0; p < n; ++p)
        if (chosen[p] >= 0)
            first_member[static_cast<std::size_t>(chosen[p])] =
                std::min(first_member[static_cast<std::size_t>(chosen[p])], static_cast<int>(p));
    std::vector<int> cluster_ids;
    for (std::size_t c = 0; c < nc; ++c)
        if (selected[c] && first_member[c] != std::numeric_limits<int>::max())
            cluster_ids.push_back(static_cast<int>(c));
    std::sort(cluster_ids.begin(), cluster_ids.end(), [&](int a, int b) {
        return first_member[static_cast<std::size_t>(a)] < first_member[static_cast<std::size_t>(b)];
    });
    std::vector<int> relabel(nc, -1);
    for (std::size_t k = 0; k < cluster_ids.size(); ++k)
        relabel[static_cast<std::size_t>(cluster_ids[k])] = static_cast<int>(k);
    for (std::size_t p = 0; p < n; ++p)
        if (chosen[p] >= 0) labels[p] = relabel[static_cast<std::size_t>(chosen[p])];
    return labels;
}

std::vector<int> hdbscan_labels(const std::vector<std::vector<double>>& points,
                                const HdbscanParams& params) {
    if (points.empty()) return {};
    const std::size_t dim = points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim) throw InvalidInput("inconsistent feature dimensions");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return hdbscan_labels(flat.data(), points.size(), dim, params);
}

}  // namespace tgvc
