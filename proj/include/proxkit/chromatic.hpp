#pragma once

#include <map>

#include "proxkit/tree.hpp"

namespace proxkit {

struct NoOppositeColor : std::runtime_error {
    NoOppositeColor() : std::runtime_error("all points share the query color") {}
};

/// Spatial tree plus per-node color histograms, kept consistent under
/// recoloring. Queries are concurrent-safe; recolor needs exclusive access.
struct ChromaticIndex {
    SpatialTree tree;
    std::vector<int> colors;
    // Histograms count leaf occurrences, so spill duplicates contribute once
    // per leaf and every node's histogram is the sum of its children's.
    std::vector<std::map<int, std::size_t>> histograms;  // per node id
    std::vector<std::vector<int>> leaves_of_point;       // leaf node ids per point

    std::size_t opposite_count(int node, int color) const {
        const auto& h = histograms[node];
        auto it = h.find(color);
        std::size_t same = it == h.end() ? 0 : it->second;
        return tree.nodes[node].count - same;
    }
};

ChromaticIndex make_chromatic(SpatialTree tree, std::vector<int> colors);

/// Nearest point of a color different from q_color. Exact mode is the
/// comprehensive traversal with an extra histogram prune on monochrome
/// subtrees; defeatist mode routes a single (non-monochrome) path.
SearchReport cnns(const ChromaticIndex& index, std::span<const double> q, int q_color,
                  std::size_t k, bool exact = true);

/// Reassigns colors and patches every ancestor histogram. Returns the
/// number of points whose color actually changed.
std::size_t recolor(ChromaticIndex& index, std::span<const std::size_t> indices,
                    int new_color);

/// Reduction: build a tree over the opposite-color subset, run exact NNS.
/// Result indices refer to the original point set.
SearchReport bnns_via_nns(std::span<const double> q, int q_color, const PointSet& X,
                          const std::vector<int>& colors, const Metric& metric,
                          const TreeConfig& cfg, std::size_t k = 1);

/// Reduction: color q as 0 and all of X as 1, delegate to BNNS.
SearchReport nns_via_bnns(std::span<const double> q, const PointSet& X,
                          const Metric& metric, const TreeConfig& cfg, std::size_t k = 1);

enum class BcpMode { Scan, NQueries, Dual };

struct BcpResult {
    std::size_t a = 0, b = 0;  // a < b
    double dist = 0.0;
};

/// Closest differently-colored pair; ties broken lexicographically on the
/// (a, b) index pair.
BcpResult bcp(const PointSet& X, const std::vector<int>& colors, const Metric& metric,
              BcpMode mode);

}  // namespace proxkit
