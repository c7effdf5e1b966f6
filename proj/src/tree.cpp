#include "proxkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "proxkit/detail/search_util.hpp"

namespace proxkit {

namespace {

using detail::dot;
using detail::dual_norm;
using detail::norm2;
using detail::TopK;

std::vector<double> mean_of(const PointSet& X, std::span<const std::size_t> idx) {
    std::vector<double> mu(X.dim, 0.0);
    for (std::size_t i : idx) {
        auto row = X[i];
        for (std::size_t d = 0; d < X.dim; ++d) mu[d] += row[d];
    }
    for (double& v : mu) v /= static_cast<double>(idx.size());
    return mu;
}

// Largest covariance eigenvector by power iteration; covariance applied
// implicitly as (1/m) sum ((x - mu).v)(x - mu).
std::vector<double> pca_direction(const PointSet& X, std::span<const std::size_t> idx,
                                  int iters, double tol) {
    const std::size_t D = X.dim;
    std::vector<double> mu = mean_of(X, idx);
    std::vector<double> v(D, 1.0 / std::sqrt(static_cast<double>(D)));
    std::vector<double> next(D);
    for (int it = 0; it < iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i : idx) {
            auto row = X[i];
            double proj = 0;
            for (std::size_t d = 0; d < D; ++d) proj += (row[d] - mu[d]) * v[d];
            for (std::size_t d = 0; d < D; ++d) next[d] += proj * (row[d] - mu[d]);
        }
        double n = norm2(next);
        if (n < 1e-300) {
            // all-ones start orthogonal to the spectrum; restart from e1
            std::fill(v.begin(), v.end(), 0.0);
            v[0] = 1.0;
            continue;
        }
        for (double& x : next) x /= n;
        double align = std::abs(dot(next, v));
        v = next;
        if (1.0 - align < tol) break;
    }
    // canonical sign: first non-negligible component positive
    for (double c : v) {
        if (std::abs(c) > 1e-12) {
            if (c < 0)
                for (double& x : v) x = -x;
            break;
        }
    }
    return v;
}

}  // namespace

namespace detail {

bool split_direction(const PointSet& X, std::span<const std::size_t> idx,
                     const Metric& metric, const SplitRule& rule, std::mt19937_64& rng,
                     std::vector<double>& w_out, bool& midpoint_threshold,
                     double& midpoint_value) {
    const std::size_t D = X.dim;
    midpoint_threshold = false;
    midpoint_value = 0;
    switch (rule.kind) {
        case SplitKind::KdMaxVariance: {
            std::vector<double> mu = mean_of(X, idx);
            std::size_t best = 0;
            double best_var = -1;
            for (std::size_t d = 0; d < D; ++d) {
                double s = 0;
                for (std::size_t i : idx) {
                    double dev = X[i][d] - mu[d];
                    s += dev * dev;
                }
                if (s > best_var) {
                    best_var = s;
                    best = d;
                }
            }
            w_out.assign(D, 0.0);
            w_out[best] = 1.0;
            return best_var > 0;
        }
        case SplitKind::RandomProjection: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int attempt = 0; attempt < 16; ++attempt) {
                w_out.resize(D);
                for (double& v : w_out) v = gauss(rng);
                double n = norm2(w_out);
                if (n > 1e-12) {
                    for (double& v : w_out) v /= n;
                    return true;
                }
            }
            return false;
        }
        case SplitKind::Pca: {
            w_out = pca_direction(X, idx, rule.power_iters, rule.tol);
            return norm2(w_out) > 0.5;
        }
        case SplitKind::TwoMeans: {
            // init: approximate farthest pair from the node's first point
            auto farthest_from = [&](std::span<const double> p) {
                std::size_t best = idx[0];
                double bd = -1;
                for (std::size_t i : idx) {
                    double d = distance(metric, p, X[i]);
                    if (d > bd) {
                        bd = d;
                        best = i;
                    }
                }
                return best;
            };
            std::size_t a = farthest_from(X[idx[0]]);
            std::size_t b = farthest_from(X[a]);
            std::vector<double> c1 = X.point(a), c2 = X.point(b);
            std::vector<int> assign(idx.size(), 0);
            for (int it = 0; it < rule.max_iters; ++it) {
                bool changed = false;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    double d1 = distance(metric, X[idx[j]], c1);
                    double d2 = distance(metric, X[idx[j]], c2);
                    int cl = d2 < d1 ? 1 : 0;
                    if (cl != assign[j]) {
                        assign[j] = cl;
                        changed = true;
                    }
                }
                if (!changed && it > 0) break;
                std::vector<double> m1(D, 0), m2(D, 0);
                std::size_t n1 = 0, n2 = 0;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    auto row = X[idx[j]];
                    if (assign[j] == 0) {
                        ++n1;
                        for (std::size_t d = 0; d < D; ++d) m1[d] += row[d];
                    } else {
                        ++n2;
                        for (std::size_t d = 0; d < D; ++d) m2[d] += row[d];
                    }
                }
                if (n1 == 0 || n2 == 0) break;
                for (std::size_t d = 0; d < D; ++d) {
                    m1[d] /= static_cast<double>(n1);
                    m2[d] /= static_cast<double>(n2);
                }
                c1 = std::move(m1);
                c2 = std::move(m2);
            }
            w_out.resize(D);
            for (std::size_t d = 0; d < D; ++d) w_out[d] = c1[d] - c2[d];
            double n = norm2(w_out);
            if (n < 1e-12) return false;
            for (double& v : w_out) v /= n;
            midpoint_threshold = true;
            midpoint_value = 0;
            for (std::size_t d = 0; d < D; ++d)
                midpoint_value += w_out[d] * 0.5 * (c1[d] + c2[d]);
            return true;
        }
    }
    return false;
}

}  // namespace detail

namespace {

struct Builder {
    const PointSet& X;
    const Metric& metric;
    const TreeConfig& cfg;
    std::mt19937_64 rng;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t> idx, int parent) {
        int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[id].parent = parent;
        nodes[id].count = idx.size();
        fill_ball(id, idx);

        if (idx.size() <= cfg.max_leaf_size) {
            nodes[id].leaf_points = std::move(idx);
            return id;
        }
        std::vector<double> w;
        bool midpoint = false;
        double mid_t = 0;
        if (!detail::split_direction(X, idx, metric, cfg.split, rng, w, midpoint, mid_t)) {
            nodes[id].leaf_points = std::move(idx);
            return id;
        }
        std::vector<double> proj(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) proj[j] = dot(w, X[idx[j]]);
        auto [mn, mx] = std::minmax_element(proj.begin(), proj.end());
        if (*mx - *mn <= 1e-12) {  // degenerate: duplicate/collinear mass
            nodes[id].leaf_points = std::move(idx);
            return id;
        }
        double t;
        if (midpoint) {
            t = mid_t;
        } else {
            std::vector<double> sorted(proj);
            std::nth_element(sorted.begin(), sorted.begin() + (sorted.size() - 1) / 2,
                             sorted.end());
            t = sorted[(sorted.size() - 1) / 2];  // lower median
        }
        double tau = 0;
        if (cfg.spill_fraction > 0) {
            std::size_t m = idx.size();
            std::size_t target =
                std::min(m, static_cast<std::size_t>(
                                std::ceil(cfg.spill_fraction * static_cast<double>(m))));
            if (target > 0) {
                std::vector<double> band(m);
                for (std::size_t j = 0; j < m; ++j) band[j] = std::abs(proj[j] - t);
                std::nth_element(band.begin(), band.begin() + (target - 1), band.end());
                tau = band[target - 1];
            }
        }
        std::vector<std::size_t> left, right;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            bool in_band = cfg.spill_mode == SpillMode::BuildDuplication && tau > 0 &&
                           std::abs(proj[j] - t) <= tau;
            if (proj[j] <= t) {
                left.push_back(idx[j]);
                if (in_band) right.push_back(idx[j]);
            } else {
                right.push_back(idx[j]);
                if (in_band) left.push_back(idx[j]);
            }
        }
        if (left.empty() || right.empty() || left.size() == idx.size() ||
            right.size() == idx.size()) {
            nodes[id].leaf_points = std::move(idx);
            return id;
        }
        nodes[id].direction = std::move(w);
        nodes[id].threshold = t;
        nodes[id].spill = tau;
        int l = build(std::move(left), id);
        int r = build(std::move(right), id);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }

    void fill_ball(int id, std::span<const std::size_t> idx) {
        nodes[id].ball_center = mean_of(X, idx);
        double r = 0;
        for (std::size_t i : idx)
            r = std::max(r, distance(metric, nodes[id].ball_center, X[i]));
        nodes[id].ball_radius = r;
    }
};

}  // namespace

SpatialTree build_tree(const PointSet& X, const Metric& metric, const TreeConfig& cfg) {
    if (X.empty()) throw std::invalid_argument("build_tree: empty point set");
    if (!metric.is_true_metric())
        throw std::invalid_argument("build_tree: tree pruning requires a true metric");
    Builder b{X, metric, cfg, std::mt19937_64(cfg.rng_seed), {}};
    std::vector<std::size_t> all(X.size());
    std::iota(all.begin(), all.end(), 0);
    b.build(std::move(all), -1);
    SpatialTree t;
    t.points = X;
    t.metric = metric;
    t.config = cfg;
    t.nodes = std::move(b.nodes);
    return t;
}

std::size_t SpatialTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const TreeNode& n = nodes[id];
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return best;
}

namespace {

void defeatist_leaves(const SpatialTree& tree, std::span<const double> q,
                      std::vector<int>& leaves, std::size_t& nodes_visited) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        ++nodes_visited;
        const TreeNode& n = tree.nodes[id];
        if (n.is_leaf()) {
            leaves.push_back(id);
            continue;
        }
        double margin = dot(n.direction, q) - n.threshold;
        if (tree.config.spill_mode == SpillMode::QueryBothSides &&
            std::abs(margin) <= n.spill) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        } else {
            stack.push_back(margin <= 0 ? n.left : n.right);
        }
    }
}

}  // namespace

SearchReport defeatist_nns(const SpatialTree& tree, std::span<const double> q,
                           std::size_t k) {
    SearchReport rep;
    std::vector<int> leaves;
    defeatist_leaves(tree, q, leaves, rep.nodes_visited);
    rep.leaves_visited = leaves.size();
    TopK top{k, {}};
    std::unordered_set<std::size_t> seen;
    for (int id : leaves) {
        const auto& pts = tree.nodes[id].leaf_points;
        rep.comparisons += pts.size();
        for (std::size_t i : pts) {
            if (!seen.insert(i).second) continue;
            top.offer({i, distance(tree.metric, q, tree.points[i])});
        }
    }
    rep.result = std::move(top).sorted();
    return rep;
}

SearchReport comprehensive_nns(const SpatialTree& tree, std::span<const double> q,
                               std::size_t k) {
    SearchReport rep;
    TopK top{k, {}};
    auto visit = [&](auto&& self, int id) -> void {
        ++rep.nodes_visited;
        const TreeNode& n = tree.nodes[id];
        if (n.is_leaf()) {
            ++rep.leaves_visited;
            rep.comparisons += n.leaf_points.size();
            for (std::size_t i : n.leaf_points)
                top.offer({i, distance(tree.metric, q, tree.points[i])});
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
    rep.result = std::move(top).sorted();
    return rep;
}

std::vector<SpatialTree> build_rp_forest(const PointSet& X, const Metric& metric,
                                         TreeConfig cfg, std::size_t n_trees) {
    if (n_trees == 0) throw std::invalid_argument("build_rp_forest: need at least one tree");
    cfg.split.kind = SplitKind::RandomProjection;
    std::vector<SpatialTree> forest;
    forest.reserve(n_trees);
    std::uint64_t base = cfg.rng_seed;
    for (std::size_t i = 0; i < n_trees; ++i) {
        cfg.rng_seed = base + i;
        forest.push_back(build_tree(X, metric, cfg));
    }
    return forest;
}

SearchReport forest_nns(const std::vector<SpatialTree>& forest, std::span<const double> q,
                        std::size_t k) {
    if (forest.empty()) throw std::invalid_argument("forest_nns: empty forest");
    SearchReport rep;
    std::unordered_set<std::size_t> candidates;
    for (const SpatialTree& tree : forest) {
        std::vector<int> leaves;
        defeatist_leaves(tree, q, leaves, rep.nodes_visited);
        rep.leaves_visited += leaves.size();
        for (int id : leaves)
            for (std::size_t i : tree.nodes[id].leaf_points) candidates.insert(i);
    }
    const SpatialTree& first = forest.front();
    TopK top{k, {}};
    for (std::size_t i : candidates)
        top.offer({i, distance(first.metric, q, first.points[i])});
    rep.comparisons = candidates.size();
    rep.result = std::move(top).sorted();
    return rep;
}

std::string tree_to_json(const SpatialTree& tree) {
    nlohmann::json j;
    j["format"] = "treefmt/1";
    j["metric"] = {{"kind", static_cast<int>(tree.metric.kind)}, {"p", tree.metric.p}};
    const TreeConfig& c = tree.config;
    j["config"] = {{"split", static_cast<int>(c.split.kind)},
                   {"power_iters", c.split.power_iters},
                   {"tol", c.split.tol},
                   {"max_iters", c.split.max_iters},
                   {"spill_fraction", c.spill_fraction},
                   {"max_leaf_size", c.max_leaf_size},
                   {"spill_mode", static_cast<int>(c.spill_mode)},
                   {"rng_seed", c.rng_seed}};
    j["dim"] = tree.points.dim;
    j["points"] = tree.points.data;
    if (tree.points.labels) j["labels"] = *tree.points.labels;
    if (tree.points.colors) j["colors"] = *tree.points.colors;
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
        nlohmann::json jn;
        jn["w"] = n.direction;
        jn["t"] = n.threshold;
        jn["tau"] = n.spill;
        jn["left"] = n.left;
        jn["right"] = n.right;
        jn["parent"] = n.parent;
        jn["leaf"] = n.leaf_points;
        jn["ball_center"] = n.ball_center;
        jn["ball_radius"] = n.ball_radius;
        jn["count"] = n.count;
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    return j.dump();
}

SpatialTree tree_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "treefmt/1")
        throw std::invalid_argument("tree_from_json: unsupported format");
    SpatialTree tree;
    tree.metric.kind = static_cast<MetricKind>(j["metric"]["kind"].get<int>());
    tree.metric.p = j["metric"]["p"].get<double>();
    const auto& c = j["config"];
    tree.config.split.kind = static_cast<SplitKind>(c["split"].get<int>());
    tree.config.split.power_iters = c["power_iters"].get<int>();
    tree.config.split.tol = c["tol"].get<double>();
    tree.config.split.max_iters = c["max_iters"].get<int>();
    tree.config.spill_fraction = c["spill_fraction"].get<double>();
    tree.config.max_leaf_size = c["max_leaf_size"].get<std::size_t>();
    tree.config.spill_mode = static_cast<SpillMode>(c["spill_mode"].get<int>());
    tree.config.rng_seed = c["rng_seed"].get<std::uint64_t>();
    tree.points.dim = j["dim"].get<std::size_t>();
    tree.points.data = j["points"].get<std::vector<double>>();
    if (j.contains("labels")) tree.points.labels = j["labels"].get<std::vector<int>>();
    if (j.contains("colors")) tree.points.colors = j["colors"].get<std::vector<int>>();
    for (const auto& jn : j["nodes"]) {
        TreeNode n;
        n.direction = jn["w"].get<std::vector<double>>();
        n.threshold = jn["t"].get<double>();
        n.spill = jn["tau"].get<double>();
        n.left = jn["left"].get<int>();
        n.right = jn["right"].get<int>();
        n.parent = jn["parent"].get<int>();
        n.leaf_points = jn["leaf"].get<std::vector<std::size_t>>();
        n.ball_center = jn["ball_center"].get<std::vector<double>>();
        n.ball_radius = jn["ball_radius"].get<double>();
        n.count = jn["count"].get<std::size_t>();
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

}  // namespace proxkit
