#pragma once

#include "proxkit/tree.hpp"

namespace proxkit {

struct BcpResult;  // chromatic.hpp

/// Queries merged into one super-query; members sorted, members[0] is the
/// representative used for shared candidate scans.
struct QueryGroup {
    std::vector<std::size_t> members;
    double diameter = 0.0;  // max pairwise member distance, < alpha
};

struct QueryNode {
    std::vector<std::size_t> groups;  // indices into QueryTree::groups
    std::vector<double> ball_center;
    double ball_radius = 0.0;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return left < 0; }
};

enum class BetaRule { Radius, MedianPair, Fixed };

struct QueryTreeConfig {
    double alpha = 0.0;            // merge threshold, distance units
    BetaRule beta_rule = BetaRule::Radius;
    double beta_value = 0.0;       // Fixed only
    std::size_t leaf_size = 8;     // stop below this many groups
};

struct QueryTree {
    PointSet queries;
    Metric metric;
    QueryTreeConfig config;
    std::vector<QueryGroup> groups;
    std::vector<QueryNode> nodes;  // nodes[0] is the root
};

/// Merges alpha-close queries into super-queries, then splits by distance to
/// the smallest-index pivot at threshold beta.
QueryTree build_query_tree(const PointSet& Q, const Metric& metric,
                           const QueryTreeConfig& cfg);

struct DualStats {
    std::size_t pruned_pairs = 0;
    std::size_t pair_visits = 0;
    std::size_t comparisons = 0;
};

/// Exact batch k-NN: one SearchReport per query (in query order); prunes a
/// (query node, reference node) pair when the ball-separation lower bound
/// exceeds every member's running kth-best distance.
std::vector<SearchReport> dual_nns(const QueryTree& qt, const SpatialTree& ref,
                                   std::size_t k, bool enable_prune = true,
                                   DualStats* stats = nullptr);

/// Closest pair between two index subsets of X via a dual-tree traversal
/// with ball-separation pruning. Returned indices refer to X.
BcpResult closest_pair_dual(const PointSet& X, const std::vector<std::size_t>& a,
                            const std::vector<std::size_t>& b, const Metric& metric);

}  // namespace proxkit
