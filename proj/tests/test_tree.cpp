#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "proxkit/data.hpp"
#include "proxkit/tree.hpp"

using namespace proxkit;

namespace {

TreeConfig make_cfg(SplitKind kind, double spill = 0.0, std::size_t leaf = 8,
                    std::uint64_t seed = 0) {
    TreeConfig cfg;
    cfg.split.kind = kind;
    cfg.spill_fraction = spill;
    cfg.max_leaf_size = leaf;
    cfg.rng_seed = seed;
    return cfg;
}

std::size_t sum_leaf_sizes(const SpatialTree& t) {
    std::size_t s = 0;
    for (const TreeNode& n : t.nodes)
        if (n.is_leaf()) s += n.leaf_points.size();
    return s;
}

}  // namespace

TEST_CASE("kd tree on 8 collinear points: median splits by hand") {
    PointSet X(1);
    for (int i = 0; i < 8; ++i) X.push_back(std::vector<double>{static_cast<double>(i)});
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::KdMaxVariance, 0, 2));
    CHECK(t.depth() == 2);
    const TreeNode& root = t.nodes[0];
    REQUIRE_FALSE(root.is_leaf());
    const TreeNode& left = t.nodes[root.left];
    REQUIRE_FALSE(left.is_leaf());
    std::vector<std::size_t> left_members;
    for (int id : {left.left, left.right})
        for (std::size_t i : t.nodes[id].leaf_points) left_members.push_back(i);
    std::sort(left_members.begin(), left_members.end());
    CHECK(left_members == std::vector<std::size_t>{0, 1, 2, 3});
    for (const TreeNode& n : t.nodes)
        if (n.is_leaf()) CHECK(n.leaf_points.size() == 2);
}

TEST_CASE("single point builds a lone leaf") {
    PointSet X(3);
    X.push_back(std::vector<double>{1, 2, 3});
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::Pca));
    CHECK(t.nodes.size() == 1);
    CHECK(t.nodes[0].is_leaf());
}

TEST_CASE("pca root direction on the two-lines set is the first axis") {
    PointSet X = gen_two_lines();
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::Pca, 0, 2));
    REQUIRE_FALSE(t.nodes[0].is_leaf());
    const auto& w = t.nodes[0].direction;
    // angle to e1 below 1e-6 means the off-axis component is below ~1e-6
    CHECK(std::abs(w[1]) < 1e-6);
    CHECK(std::abs(std::abs(w[0]) - 1.0) < 1e-6);
}

TEST_CASE("defeatist with tau=0 visits one leaf and scans exactly it") {
    PointSet X = oracles::random_points(100, 3, 21);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::KdMaxVariance, 0, 5));
    SearchReport rep = defeatist_nns(t, X[13], 1);
    CHECK(rep.leaves_visited == 1);
    bool found_leaf = false;
    for (const TreeNode& n : t.nodes)
        if (n.is_leaf() && n.leaf_points.size() == rep.comparisons) found_leaf = true;
    CHECK(found_leaf);
    // routing consistency: a dataset point reaches its own leaf
    CHECK(rep.result[0].index == 13);
    CHECK(rep.result[0].dist == 0.0);
}

TEST_CASE("defeatist on the two-lines pca tree fails for most points") {
    PointSet X = gen_two_lines();
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::Pca, 0, 2));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto truth = brute_nn(Metric::euclidean(), X[i], X, 2);
        std::size_t true_nn = truth[0].index == i ? truth[1].index : truth[0].index;
        SearchReport rep = defeatist_nns(t, X[i], 2);
        std::size_t got = X.size();
        for (const Neighbor& nb : rep.result)
            if (nb.index != i) {
                got = nb.index;
                break;
            }
        if (got == true_nn) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(X.size()) < 0.5);
}

TEST_CASE("comprehensive search is exact for every rule and spill") {
    std::uint64_t seed = 100;
    for (SplitKind kind : {SplitKind::KdMaxVariance, SplitKind::RandomProjection,
                           SplitKind::Pca, SplitKind::TwoMeans})
        for (double spill : {0.0, 0.05, 0.1}) {
            PointSet X = oracles::random_points(120, 4, seed);
            SpatialTree t =
                build_tree(X, Metric::euclidean(), make_cfg(kind, spill, 4, seed));
            std::mt19937_64 rng(seed + 1);
            std::uniform_real_distribution<double> unif(-0.2, 1.2);
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> q(4);
                for (double& v : q) v = unif(rng);
                for (std::size_t k : {std::size_t{1}, std::size_t{5}}) {
                    auto truth = brute_nn(Metric::euclidean(), q, X, k);
                    SearchReport rep = comprehensive_nns(t, q, k);
                    REQUIRE(rep.result.size() == truth.size());
                    for (std::size_t i = 0; i < truth.size(); ++i) {
                        CHECK(rep.result[i].index == truth[i].index);
                        CHECK(rep.result[i].dist == truth[i].dist);
                    }
                }
            }
            ++seed;
        }
}

TEST_CASE("comprehensive search is exact under minkowski p=1 and p=3") {
    for (double p : {1.0, 3.0}) {
        Metric m = Metric::minkowski(p);
        PointSet X = oracles::random_points(80, 3, 77);
        SpatialTree t = build_tree(X, m, make_cfg(SplitKind::RandomProjection, 0.05, 4, 3));
        for (int trial = 0; trial < 15; ++trial) {
            PointSet Q = oracles::random_points(1, 3, 200 + trial, -0.5, 1.5);
            auto truth = brute_nn(m, Q[0], X, 3);
            SearchReport rep = comprehensive_nns(t, Q[0], 3);
            REQUIRE(rep.result.size() == 3);
            for (std::size_t i = 0; i < 3; ++i) CHECK(rep.result[i].index == truth[i].index);
        }
    }
}

TEST_CASE("comprehensive with k = n returns the full sorted scan") {
    PointSet X = oracles::random_points(60, 2, 8);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::TwoMeans, 0, 4));
    std::vector<double> q{0.5, 0.5};
    auto truth = brute_nn(Metric::euclidean(), q, X, X.size());
    SearchReport rep = comprehensive_nns(t, q, X.size());
    REQUIRE(rep.result.size() == truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(rep.result[i].index == truth[i].index);
}

TEST_CASE("build determinism: identical config gives identical trees") {
    PointSet X = oracles::random_points(90, 3, 33);
    TreeConfig cfg = make_cfg(SplitKind::RandomProjection, 0.05, 4, 99);
    std::string a = tree_to_json(build_tree(X, Metric::euclidean(), cfg));
    std::string b = tree_to_json(build_tree(X, Metric::euclidean(), cfg));
    CHECK(a == b);
}

TEST_CASE("spill duplication: band membership and leaf-size monotonicity") {
    PointSet X = oracles::random_points(150, 3, 12);
    for (SplitKind kind : {SplitKind::KdMaxVariance, SplitKind::RandomProjection}) {
        std::size_t prev = 0;
        for (double spill : {0.0, 0.05, 0.1}) {
            SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(kind, spill, 4, 5));
            std::size_t total = sum_leaf_sizes(t);
            CHECK(total >= prev);
            CHECK(total >= X.size());  // every index appears in at least one leaf
            prev = total;
            // a point sits in both children iff its projection is inside the band
            for (const TreeNode& n : t.nodes) {
                if (n.is_leaf()) continue;
                auto members = [&](int id) {
                    std::vector<std::size_t> out;
                    std::vector<int> stack{id};
                    while (!stack.empty()) {
                        int cur = stack.back();
                        stack.pop_back();
                        if (t.nodes[cur].is_leaf()) {
                            for (std::size_t i : t.nodes[cur].leaf_points) out.push_back(i);
                        } else {
                            stack.push_back(t.nodes[cur].left);
                            stack.push_back(t.nodes[cur].right);
                        }
                    }
                    std::sort(out.begin(), out.end());
                    out.erase(std::unique(out.begin(), out.end()), out.end());
                    return out;
                };
                std::vector<std::size_t> lm = members(n.left), rm = members(n.right);
                std::vector<std::size_t> both;
                std::set_intersection(lm.begin(), lm.end(), rm.begin(), rm.end(),
                                      std::back_inserter(both));
                for (std::size_t i : both) {
                    double margin = 0;
                    for (std::size_t d = 0; d < X.dim; ++d)
                        margin += n.direction[d] * X[i][d];
                    CHECK(std::abs(margin - n.threshold) <= n.spill + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("tau=0 leaves partition the index set and depth is bounded") {
    PointSet X = oracles::random_points(128, 4, 41);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::KdMaxVariance, 0, 4));
    std::vector<std::size_t> all;
    for (const TreeNode& n : t.nodes)
        if (n.is_leaf()) all.insert(all.end(), n.leaf_points.begin(), n.leaf_points.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(X.size());
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all == expect);
    std::size_t bound = static_cast<std::size_t>(
                            std::ceil(std::log2(static_cast<double>(X.size()) / 4.0))) +
                        1;
    CHECK(t.depth() <= bound);
}

TEST_CASE("bounding balls contain their points") {
    PointSet X = oracles::random_points(100, 3, 61);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::TwoMeans, 0.05, 4));
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        std::vector<int> stack{static_cast<int>(id)};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            if (t.nodes[cur].is_leaf()) {
                for (std::size_t i : t.nodes[cur].leaf_points)
                    CHECK(distance(t.metric, t.nodes[id].ball_center, X[i]) <=
                          t.nodes[id].ball_radius + 1e-9);
            } else {
                stack.push_back(t.nodes[cur].left);
                stack.push_back(t.nodes[cur].right);
            }
        }
    }
}

TEST_CASE("kd direction maximizes the per-coordinate deviation sum") {
    PointSet X = oracles::random_points(50, 5, 71);
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(0);
    std::vector<double> w;
    bool mid = false;
    double mid_t = 0;
    REQUIRE(detail::split_direction(X, idx, Metric::euclidean(), SplitRule{}, rng, w, mid,
                                    mid_t));
    std::size_t axis = 0;
    for (std::size_t d = 0; d < w.size(); ++d)
        if (w[d] == 1.0) axis = d;
    std::vector<double> mu(X.dim, 0);
    for (std::size_t i : idx)
        for (std::size_t d = 0; d < X.dim; ++d) mu[d] += X[i][d];
    for (double& v : mu) v /= static_cast<double>(idx.size());
    std::vector<double> var(X.dim, 0);
    for (std::size_t i : idx)
        for (std::size_t d = 0; d < X.dim; ++d) {
            double dev = X[i][d] - mu[d];
            var[d] += dev * dev;
        }
    CHECK(var[axis] == *std::max_element(var.begin(), var.end()));
}

TEST_CASE("pca direction is an eigenvector of the node covariance") {
    // stretch one coordinate so the top eigenvalue is well separated and
    // power iteration converges within its fixed budget
    PointSet X = oracles::random_points(80, 4, 15);
    for (std::size_t i = 0; i < X.size(); ++i) X.data[i * X.dim] *= 6.0;
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(0);
    SplitRule rule;
    rule.kind = SplitKind::Pca;
    std::vector<double> w;
    bool mid = false;
    double mid_t = 0;
    REQUIRE(detail::split_direction(X, idx, Metric::euclidean(), rule, rng, w, mid, mid_t));
    // residual ||Sigma w - (w' Sigma w) w|| relative to ||Sigma w||
    std::vector<double> mu(X.dim, 0);
    for (std::size_t i : idx)
        for (std::size_t d = 0; d < X.dim; ++d) mu[d] += X[i][d];
    for (double& v : mu) v /= static_cast<double>(idx.size());
    std::vector<double> sw(X.dim, 0);
    for (std::size_t i : idx) {
        double proj = 0;
        for (std::size_t d = 0; d < X.dim; ++d) proj += (X[i][d] - mu[d]) * w[d];
        for (std::size_t d = 0; d < X.dim; ++d) sw[d] += proj * (X[i][d] - mu[d]);
    }
    double lambda = 0, norm_sw = 0;
    for (std::size_t d = 0; d < X.dim; ++d) {
        lambda += sw[d] * w[d];
        norm_sw += sw[d] * sw[d];
    }
    double resid = 0;
    for (std::size_t d = 0; d < X.dim; ++d) {
        double r = sw[d] - lambda * w[d];
        resid += r * r;
    }
    CHECK(std::sqrt(resid) <= 1e-6 * std::sqrt(norm_sw));
}

TEST_CASE("twomeans threshold is the midpoint of the cluster centers") {
    PointSet X(1);
    for (double v : {0.0, 0.1, 10.0, 10.1}) X.push_back(std::vector<double>{v});
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::TwoMeans, 0, 2));
    REQUIRE_FALSE(t.nodes[0].is_leaf());
    // clusters {0, 0.1} and {10, 10.1}: centers 0.05 and 10.05, midpoint 5.05
    double t_signed = t.nodes[0].threshold * t.nodes[0].direction[0];
    CHECK(std::abs(std::abs(t_signed) - 5.05) < 1e-12);
}

TEST_CASE("defeatist never beats the brute optimum") {
    PointSet X = oracles::random_points(120, 3, 55);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::RandomProjection, 0, 2, 7));
    std::mt19937_64 rng(56);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> q{unif(rng), unif(rng), unif(rng)};
        double best = brute_nn(Metric::euclidean(), q, X, 1)[0].dist;
        SearchReport rep = defeatist_nns(t, q, 1);
        CHECK(rep.result[0].dist >= best);
    }
}

TEST_CASE("query-both-sides spill mode descends the band") {
    PointSet X = oracles::random_points(100, 2, 91);
    TreeConfig cfg = make_cfg(SplitKind::KdMaxVariance, 0.2, 4, 0);
    cfg.spill_mode = SpillMode::QueryBothSides;
    SpatialTree both = build_tree(X, Metric::euclidean(), cfg);
    CHECK(sum_leaf_sizes(both) == X.size());  // no duplication in this mode
    std::size_t multi = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        SearchReport rep = defeatist_nns(both, X[i], 1);
        CHECK(rep.result[0].dist == 0.0);
        if (rep.leaves_visited > 1) ++multi;
    }
    CHECK(multi > 0);
}

TEST_CASE("forest of one tree equals plain defeatist") {
    PointSet X = oracles::random_points(80, 3, 23);
    TreeConfig cfg = make_cfg(SplitKind::RandomProjection, 0, 4, 17);
    auto forest = build_rp_forest(X, Metric::euclidean(), cfg, 1);
    SpatialTree solo = build_tree(X, Metric::euclidean(), [&] {
        TreeConfig c = cfg;
        c.rng_seed = cfg.rng_seed;  // forest tree 0 uses base seed
        return c;
    }());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> q{unif(rng), unif(rng), unif(rng)};
        SearchReport a = forest_nns(forest, q, 1);
        SearchReport b = defeatist_nns(solo, q, 1);
        CHECK(a.result[0].index == b.result[0].index);
    }
}

TEST_CASE("forest recall is at least single-tree recall") {
    PointSet X = oracles::random_points(200, 6, 47);
    TreeConfig cfg = make_cfg(SplitKind::RandomProjection, 0, 4, 3);
    auto forest5 = build_rp_forest(X, Metric::euclidean(), cfg, 5);
    auto forest1 = build_rp_forest(X, Metric::euclidean(), cfg, 1);
    std::mt19937_64 rng(48);
    std::uniform_real_distribution<double> unif(0, 1);
    std::size_t hit1 = 0, hit5 = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(6);
        for (double& v : q) v = unif(rng);
        std::size_t truth = brute_nn(Metric::euclidean(), q, X, 1)[0].index;
        if (forest_nns(forest1, q, 1).result[0].index == truth) ++hit1;
        if (forest_nns(forest5, q, 1).result[0].index == truth) ++hit5;
    }
    CHECK(hit5 >= hit1);
    // membership query hits in every tree
    CHECK(forest_nns(forest5, X[3], 1).result[0].dist == 0.0);
}

TEST_CASE("json round trip preserves the tree") {
    PointSet X = oracles::random_points(60, 3, 29);
    SpatialTree t = build_tree(X, Metric::euclidean(), make_cfg(SplitKind::Pca, 0.05, 4));
    std::string text = tree_to_json(t);
    SpatialTree back = tree_from_json(text);
    CHECK(tree_to_json(back) == text);
    std::vector<double> q{0.3, 0.6, 0.9};
    SearchReport a = comprehensive_nns(t, q, 3);
    SearchReport b = comprehensive_nns(back, q, 3);
    REQUIRE(a.result.size() == b.result.size());
    for (std::size_t i = 0; i < a.result.size(); ++i)
        CHECK(a.result[i].index == b.result[i].index);
    CHECK_THROWS(tree_from_json("{\"format\":\"treefmt/0\"}"));
}

TEST_CASE("trees reject non-metrics and empty input") {
    PointSet X = oracles::random_points(10, 2, 1);
    CHECK_THROWS_AS(build_tree(X, Metric::kl(), TreeConfig{}), std::invalid_argument);
    PointSet empty(2);
    CHECK_THROWS_AS(build_tree(empty, Metric::euclidean(), TreeConfig{}),
                    std::invalid_argument);
    CHECK_THROWS(build_rp_forest(X, Metric::euclidean(), TreeConfig{}, 0));
}
