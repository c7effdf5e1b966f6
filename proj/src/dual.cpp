#include "proxkit/dual.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "proxkit/chromatic.hpp"
#include "proxkit/detail/search_util.hpp"

namespace proxkit {

namespace {

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

}  // namespace

QueryTree build_query_tree(const PointSet& Q, const Metric& metric,
                           const QueryTreeConfig& cfg) {
    if (Q.empty()) throw std::invalid_argument("build_query_tree: empty query set");
    QueryTree qt;
    qt.queries = Q;
    qt.metric = metric;
    qt.config = cfg;

    // Greedy merge in index order; a point joins only if it is alpha-close
    // to every current member, which keeps the pairwise-diameter invariant.
    std::vector<bool> taken(Q.size(), false);
    for (std::size_t i = 0; i < Q.size(); ++i) {
        if (taken[i]) continue;
        QueryGroup g;
        g.members.push_back(i);
        taken[i] = true;
        if (cfg.alpha > 0) {
            for (std::size_t j = i + 1; j < Q.size(); ++j) {
                if (taken[j]) continue;
                bool close = true;
                double worst = 0;
                for (std::size_t m : g.members) {
                    double d = distance(metric, Q[j], Q[m]);
                    worst = std::max(worst, d);
                    if (!(d < cfg.alpha)) {
                        close = false;
                        break;
                    }
                }
                if (close) {
                    g.members.push_back(j);
                    g.diameter = std::max(g.diameter, worst);
                    taken[j] = true;
                }
            }
            std::sort(g.members.begin(), g.members.end());
        }
        qt.groups.push_back(std::move(g));
    }

    auto member_points = [&](std::span<const std::size_t> group_ids) {
        std::vector<std::size_t> pts;
        for (std::size_t g : group_ids)
            pts.insert(pts.end(), qt.groups[g].members.begin(), qt.groups[g].members.end());
        return pts;
    };

    auto build = [&](auto&& self, std::vector<std::size_t> group_ids) -> int {
        int id = static_cast<int>(qt.nodes.size());
        qt.nodes.emplace_back();
        std::vector<std::size_t> pts = member_points(group_ids);
        qt.nodes[id].ball_center = mean_of(Q, pts);
        double r = 0;
        for (std::size_t p : pts)
            r = std::max(r, distance(metric, qt.nodes[id].ball_center, Q[p]));
        qt.nodes[id].ball_radius = r;

        if (group_ids.size() <= cfg.leaf_size) {
            qt.nodes[id].groups = std::move(group_ids);
            return id;
        }
        // pivot q': the group holding the smallest point index
        std::size_t pivot_group = group_ids.front();
        for (std::size_t g : group_ids)
            if (qt.groups[g].members.front() < qt.groups[pivot_group].members.front())
                pivot_group = g;
        auto pivot = qt.queries[qt.groups[pivot_group].members.front()];
        double beta = cfg.beta_value;
        if (cfg.beta_rule == BetaRule::Radius) {
            beta = r;
        } else if (cfg.beta_rule == BetaRule::MedianPair) {
            std::vector<double> pd;
            for (std::size_t a = 0; a < group_ids.size(); ++a)
                for (std::size_t b = a + 1; b < group_ids.size(); ++b)
                    pd.push_back(distance(metric,
                                          Q[qt.groups[group_ids[a]].members.front()],
                                          Q[qt.groups[group_ids[b]].members.front()]));
            std::nth_element(pd.begin(), pd.begin() + (pd.size() - 1) / 2, pd.end());
            beta = pd[(pd.size() - 1) / 2];
        }
        std::vector<std::size_t> left, right;
        for (std::size_t g : group_ids) {
            double d = distance(metric, Q[qt.groups[g].members.front()], pivot);
            (d < beta ? left : right).push_back(g);
        }
        if (left.empty() || right.empty()) {  // failed split
            qt.nodes[id].groups = std::move(group_ids);
            return id;
        }
        int l = self(self, std::move(left));
        int rr = self(self, std::move(right));
        qt.nodes[id].left = l;
        qt.nodes[id].right = rr;
        return id;
    };
    std::vector<std::size_t> all(qt.groups.size());
    std::iota(all.begin(), all.end(), 0);
    build(build, std::move(all));
    return qt;
}

namespace {

struct DualSearcher {
    const QueryTree& qt;
    const SpatialTree& ref;
    std::size_t k;
    bool prune;
    DualStats stats;
    std::vector<TopK> tops;  // per query index

    double b1(int q_id) const {
        // most conservative sound bound: max over all queries in the subtree
        const QueryNode& qn = qt.nodes[q_id];
        if (!qn.is_leaf())
            return std::max(b1(qn.left), b1(qn.right));
        double worst = 0;
        for (std::size_t g : qn.groups)
            for (std::size_t m : qt.groups[g].members) {
                double b = tops[m].bound();
                if (b > worst) worst = b;
                if (b == std::numeric_limits<double>::infinity()) return b;
            }
        return worst;
    }

    void scan_leaf_pair(const QueryNode& qn, const TreeNode& rn) {
        for (std::size_t g : qn.groups) {
            const QueryGroup& grp = qt.groups[g];
            std::size_t rep = grp.members.front();
            for (std::size_t x : rn.leaf_points) {
                ++stats.comparisons;
                double d_rep = distance(ref.metric, qt.queries[rep], ref.points[x]);
                tops[rep].offer({x, d_rep});
                if (grp.members.size() == 1) continue;
                // shared-candidate shortcut: members sit within the group
                // diameter of the representative
                double worst = 0;
                for (std::size_t j = 1; j < grp.members.size(); ++j)
                    worst = std::max(worst, tops[grp.members[j]].bound());
                if (d_rep - grp.diameter > worst) continue;
                for (std::size_t j = 1; j < grp.members.size(); ++j) {
                    std::size_t m = grp.members[j];
                    ++stats.comparisons;
                    tops[m].offer({x, distance(ref.metric, qt.queries[m], ref.points[x])});
                }
            }
        }
    }

    void visit(int q_id, int r_id) {
        ++stats.pair_visits;
        const QueryNode& qn = qt.nodes[q_id];
        const TreeNode& rn = ref.nodes[r_id];
        if (prune) {
            double lb = distance(ref.metric, qn.ball_center, rn.ball_center) -
                        qn.ball_radius - rn.ball_radius;
            if (lb > b1(q_id)) {
                ++stats.pruned_pairs;
                return;
            }
        }
        if (qn.is_leaf() && rn.is_leaf()) {
            scan_leaf_pair(qn, rn);
            return;
        }
        bool split_ref =
            !rn.is_leaf() && (qn.is_leaf() || rn.ball_radius >= qn.ball_radius);
        if (split_ref) {
            double dl = distance(ref.metric, qn.ball_center, ref.nodes[rn.left].ball_center);
            double dr = distance(ref.metric, qn.ball_center, ref.nodes[rn.right].ball_center);
            if (dl <= dr) {
                visit(q_id, rn.left);
                visit(q_id, rn.right);
            } else {
                visit(q_id, rn.right);
                visit(q_id, rn.left);
            }
        } else {
            visit(qn.left, r_id);
            visit(qn.right, r_id);
        }
    }
};

}  // namespace

std::vector<SearchReport> dual_nns(const QueryTree& qt, const SpatialTree& ref,
                                   std::size_t k, bool enable_prune, DualStats* stats) {
    DualSearcher s{qt, ref, k, enable_prune, {}, {}};
    s.tops.assign(qt.queries.size(), TopK{k, {}});
    s.visit(0, 0);
    std::vector<SearchReport> out(qt.queries.size());
    for (std::size_t i = 0; i < qt.queries.size(); ++i) {
        out[i].result = std::move(s.tops[i]).sorted();
        out[i].comparisons = s.stats.comparisons;  // shared traversal cost
    }
    if (stats) *stats = s.stats;
    return out;
}

BcpResult closest_pair_dual(const PointSet& X, const std::vector<std::size_t>& a,
                            const std::vector<std::size_t>& b, const Metric& metric) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("closest_pair_dual: both sides must be nonempty");
    std::vector<std::size_t> av(a.begin(), a.end()), bv(b.begin(), b.end());
    PointSet pa = X.subset(av), pb = X.subset(bv);
    TreeConfig cfg;
    SpatialTree ta = build_tree(pa, metric, cfg), tb = build_tree(pb, metric, cfg);
    BcpResult best{0, 0, std::numeric_limits<double>::infinity()};
    auto better = [&](const BcpResult& c) {
        if (c.dist != best.dist) return c.dist < best.dist;
        if (c.a != best.a) return c.a < best.a;
        return c.b < best.b;
    };
    auto visit = [&](auto&& self, int ia, int ib) -> void {
        const TreeNode& na = ta.nodes[ia];
        const TreeNode& nb = tb.nodes[ib];
        double lb = distance(metric, na.ball_center, nb.ball_center) - na.ball_radius -
                    nb.ball_radius;
        if (lb > best.dist) return;
        if (na.is_leaf() && nb.is_leaf()) {
            for (std::size_t i : na.leaf_points)
                for (std::size_t j : nb.leaf_points) {
                    std::size_t oi = av[i], oj = bv[j];
                    BcpResult cand{std::min(oi, oj), std::max(oi, oj),
                                   distance(metric, pa[i], pb[j])};
                    if (better(cand)) best = cand;
                }
            return;
        }
        if (!na.is_leaf() && (nb.is_leaf() || na.ball_radius >= nb.ball_radius)) {
            self(self, na.left, ib);
            self(self, na.right, ib);
        } else {
            self(self, ia, nb.left);
            self(self, ia, nb.right);
        }
    };
    visit(visit, 0, 0);
    return best;
}

}  // namespace proxkit
