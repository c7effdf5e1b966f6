#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "proxkit/core.hpp"

namespace proxkit {

enum class SplitKind { KdMaxVariance, RandomProjection, Pca, TwoMeans };

struct SplitRule {
    SplitKind kind = SplitKind::KdMaxVariance;
    int power_iters = 100;   // Pca
    double tol = 1e-9;       // Pca
    int max_iters = 25;      // TwoMeans
};

enum class SpillMode { BuildDuplication, QueryBothSides };

struct TreeConfig {
    SplitRule split;
    double spill_fraction = 0.0;  // alpha_s in [0, 0.5)
    std::size_t max_leaf_size = 8;
    SpillMode spill_mode = SpillMode::BuildDuplication;
    std::uint64_t rng_seed = 0;
};

struct TreeNode {
    std::vector<double> direction;  // unit vector w, empty for leaves
    double threshold = 0.0;         // t
    double spill = 0.0;             // tau >= 0
    int left = -1;
    int right = -1;
    int parent = -1;
    std::vector<std::size_t> leaf_points;  // indices into the owning PointSet
    std::vector<double> ball_center;
    double ball_radius = 0.0;  // lambda
    std::size_t count = 0;     // points beneath (duplicates included)

    bool is_leaf() const { return left < 0; }
};

/// Binary spatial-partition tree. Owns a copy of its dataset; immutable
/// after build, concurrent read-only queries are safe.
struct SpatialTree {
    PointSet points;
    Metric metric;
    TreeConfig config;
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t depth() const;
};

struct SearchReport {
    std::vector<Neighbor> result;
    std::size_t comparisons = 0;
    std::size_t leaves_visited = 0;
    std::size_t nodes_visited = 0;
};

SpatialTree build_tree(const PointSet& X, const Metric& metric, const TreeConfig& cfg);

/// Single root-to-leaf descent, no backtracking. In QueryBothSides mode the
/// descent takes both children when |w.q - t| <= tau.
SearchReport defeatist_nns(const SpatialTree& tree, std::span<const double> q, std::size_t k);

/// Exact search: prunes a subtree only when the split margin proves it cannot
/// hold a better neighbor. Result identical to brute_nn.
SearchReport comprehensive_nns(const SpatialTree& tree, std::span<const double> q, std::size_t k);

std::vector<SpatialTree> build_rp_forest(const PointSet& X, const Metric& metric,
                                         TreeConfig cfg, std::size_t n_trees);

/// Defeatist-search every tree, scan the union of reached leaf candidates
/// (duplicates counted once).
SearchReport forest_nns(const std::vector<SpatialTree>& forest, std::span<const double> q,
                        std::size_t k);

// "treefmt/1" JSON serialization.
std::string tree_to_json(const SpatialTree& tree);
SpatialTree tree_from_json(const std::string& text);

namespace detail {
// Unit split direction for a node's points; returns false when the rule
// degenerates (e.g. zero spread). Exposed for the split-rule unit tests.
bool split_direction(const PointSet& X, std::span<const std::size_t> idx,
                     const Metric& metric, const SplitRule& rule, std::mt19937_64& rng,
                     std::vector<double>& w_out, bool& midpoint_threshold,
                     double& midpoint_value);
}  // namespace detail

}  // namespace proxkit
