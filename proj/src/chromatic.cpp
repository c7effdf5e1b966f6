#include "proxkit/chromatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "proxkit/detail/search_util.hpp"
#include "proxkit/dual.hpp"

namespace proxkit {

namespace {

using detail::dot;
using detail::dual_norm;
using detail::TopK;

}  // namespace

ChromaticIndex make_chromatic(SpatialTree tree, std::vector<int> colors) {
    if (colors.size() != tree.points.size())
        throw std::invalid_argument("make_chromatic: one color per point required");
    ChromaticIndex idx;
    idx.tree = std::move(tree);
    idx.colors = std::move(colors);
    idx.histograms.assign(idx.tree.nodes.size(), {});
    idx.leaves_of_point.assign(idx.tree.points.size(), {});
    for (std::size_t nid = 0; nid < idx.tree.nodes.size(); ++nid) {
        const TreeNode& n = idx.tree.nodes[nid];
        if (!n.is_leaf()) continue;
        for (std::size_t p : n.leaf_points) {
            idx.leaves_of_point[p].push_back(static_cast<int>(nid));
            for (int cur = static_cast<int>(nid); cur >= 0; cur = idx.tree.nodes[cur].parent)
                ++idx.histograms[cur][idx.colors[p]];
        }
    }
    return idx;
}

std::size_t recolor(ChromaticIndex& index, std::span<const std::size_t> indices,
                    int new_color) {
    std::size_t events = 0;
    for (std::size_t p : indices) {
        if (p >= index.colors.size())
            throw std::out_of_range("recolor: point index out of range");
        int old = index.colors[p];
        if (old == new_color) continue;
        index.colors[p] = new_color;
        for (int leaf : index.leaves_of_point[p]) {
            for (int cur = leaf; cur >= 0; cur = index.tree.nodes[cur].parent) {
                auto& h = index.histograms[cur];
                auto it = h.find(old);
                if (--it->second == 0) h.erase(it);
                ++h[new_color];
            }
        }
        ++events;
    }
    return events;
}

SearchReport cnns(const ChromaticIndex& index, std::span<const double> q, int q_color,
                  std::size_t k, bool exact) {
    const SpatialTree& tree = index.tree;
    if (index.opposite_count(0, q_color) == 0) throw NoOppositeColor();
    SearchReport rep;
    TopK top{k, {}};
    auto scan_leaf = [&](int id) {
        ++rep.leaves_visited;
        for (std::size_t i : tree.nodes[id].leaf_points) {
            if (index.colors[i] == q_color) continue;
            ++rep.comparisons;
            top.offer({i, distance(tree.metric, q, tree.points[i])});
        }
    };
    if (exact) {
        auto visit = [&](auto&& self, int id) -> void {
            if (index.opposite_count(id, q_color) == 0) return;  // monochrome subtree
            ++rep.nodes_visited;
            const TreeNode& n = tree.nodes[id];
            if (n.is_leaf()) {
                scan_leaf(id);
                return;
            }
            double margin = dot(n.direction, q) - n.threshold;
            int near = margin <= 0 ? n.left : n.right;
            int far = margin <= 0 ? n.right : n.left;
            self(self, near);
            double lb = std::max(0.0, std::abs(margin) - n.spill) /
                        dual_norm(n.direction, tree.metric);
            if (!(lb > top.bound())) self(self, far);
        };
        visit(visit, 0);
    } else {
        std::vector<int> stack{0};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            ++rep.nodes_visited;
            const TreeNode& n = tree.nodes[id];
            if (n.is_leaf()) {
                scan_leaf(id);
                continue;
            }
            double margin = dot(n.direction, q) - n.threshold;
            bool left_ok = index.opposite_count(n.left, q_color) > 0;
            bool right_ok = index.opposite_count(n.right, q_color) > 0;
            if (tree.config.spill_mode == SpillMode::QueryBothSides &&
                std::abs(margin) <= n.spill) {
                if (left_ok) stack.push_back(n.left);
                if (right_ok) stack.push_back(n.right);
                continue;
            }
            int chosen = margin <= 0 ? n.left : n.right;
            int other = margin <= 0 ? n.right : n.left;
            bool chosen_ok = chosen == n.left ? left_ok : right_ok;
            stack.push_back(chosen_ok ? chosen : other);
        }
    }
    rep.result = std::move(top).sorted();
    return rep;
}

SearchReport bnns_via_nns(std::span<const double> q, int q_color, const PointSet& X,
                          const std::vector<int>& colors, const Metric& metric,
                          const TreeConfig& cfg, std::size_t k) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (colors[i] != q_color) keep.push_back(i);
    if (keep.empty()) throw NoOppositeColor();
    PointSet sub = X.subset(keep);
    SpatialTree tree = build_tree(sub, metric, cfg);
    SearchReport rep = comprehensive_nns(tree, q, k);
    for (Neighbor& n : rep.result) n.index = keep[n.index];
    return rep;
}

SearchReport nns_via_bnns(std::span<const double> q, const PointSet& X,
                          const Metric& metric, const TreeConfig& cfg, std::size_t k) {
    std::vector<int> colors(X.size(), 1);  // chi(q) = 0, chi(x) = 1
    return bnns_via_nns(q, 0, X, colors, metric, cfg, k);
}

namespace {

bool pair_less(const BcpResult& a, const BcpResult& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.a != b.a) return a.a < b.a;
    return a.b < b.b;
}

BcpResult make_pair_result(std::size_t i, std::size_t j, double d) {
    return {std::min(i, j), std::max(i, j), d};
}

}  // namespace

BcpResult bcp(const PointSet& X, const std::vector<int>& colors, const Metric& metric,
              BcpMode mode) {
    std::set<int> distinct(colors.begin(), colors.end());
    if (distinct.size() < 2)
        throw std::invalid_argument("bcp: at least two colors required");
    BcpResult best{0, 0, std::numeric_limits<double>::infinity()};
    switch (mode) {
        case BcpMode::Scan: {
            for (std::size_t i = 0; i < X.size(); ++i)
                for (std::size_t j = i + 1; j < X.size(); ++j) {
                    if (colors[i] == colors[j]) continue;
                    BcpResult cand = make_pair_result(i, j, distance(metric, X[i], X[j]));
                    if (pair_less(cand, best)) best = cand;
                }
            break;
        }
        case BcpMode::NQueries: {
            TreeConfig cfg;  // kd tree, defaults
            ChromaticIndex index = make_chromatic(build_tree(X, metric, cfg), colors);
            for (std::size_t i = 0; i < X.size(); ++i) {
                SearchReport rep = cnns(index, X[i], colors[i], 1, true);
                BcpResult cand = make_pair_result(i, rep.result[0].index, rep.result[0].dist);
                if (pair_less(cand, best)) best = cand;
            }
            break;
        }
        case BcpMode::Dual: {
            for (int c : distinct) {
                std::vector<std::size_t> a, b;
                for (std::size_t i = 0; i < X.size(); ++i)
                    (colors[i] == c ? a : b).push_back(i);
                BcpResult cand = closest_pair_dual(X, a, b, metric);
                if (pair_less(cand, best)) best = cand;
            }
            break;
        }
    }
    return best;
}

}  // namespace proxkit
