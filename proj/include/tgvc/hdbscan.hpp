#pragma once

#include <cstddef>
#include <vector>

namespace tgvc {

struct HdbscanParams {
    int min_cluster_size = 16;
    int min_samples = 8;
};

/// Hierarchical density-based clustering over Euclidean points.
///
/// Returns one label per point: -1 for noise, otherwise cluster ids numbered
/// by the smallest member index. Pipeline: core distances (distance to the
/// min_samples-th nearest other point), mutual-reachability minimum spanning
/// tree, single-linkage hierarchy condensed at min_cluster_size, and
/// excess-of-mass cluster selection. All ties break on point index, so the
/// result is deterministic for a fixed input order, and every comparison is
/// relative, so labels are invariant under uniform positive scaling of the
/// inputs.
///
/// The root of the condensed hierarchy is not selectable, with one exception:
/// when the hierarchy never splits and at least min_cluster_size points are
/// mutually at distance zero, those points form a single cluster (a clump of
/// identical points would otherwise come back as all noise).
std::vector<int> hdbscan_labels(const double* points, std::size_t n, std::size_t dim,
                                const HdbscanParams& params);

std::vector<int> hdbscan_labels(const std::vector<std::vector<double>>& points,
                                const HdbscanParams& params);

}  // namespace tgvc
