#include "proxkit/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace proxkit {

namespace {

struct CandidateEdge {
    std::size_t u = 0, v = 0;  // u < v
    double weight = std::numeric_limits<double>::infinity();

    // (weight, min endpoint, max endpoint): the cycle-safe tie order
    bool operator<(const CandidateEdge& o) const {
        if (weight != o.weight) return weight < o.weight;
        if (u != o.u) return u < o.u;
        return v < o.v;
    }
};

}  // namespace

EmstResult emst_boruvka(const PointSet& X, const Metric& metric, const TreeConfig& cfg) {
    const std::size_t n = X.size();
    if (n == 0) throw std::invalid_argument("emst_boruvka: empty point set");
    EmstResult res;
    if (n == 1) return res;

    std::vector<int> colors(n);
    std::iota(colors.begin(), colors.end(), 0);
    ChromaticIndex index = make_chromatic(build_tree(X, metric, cfg), colors);

    std::vector<std::vector<std::size_t>> members(n);  // per color
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    std::size_t component_count = n;

    while (component_count > 1) {
        ++res.rounds;
        // query phase: colors are fixed, every vertex asks for its lightest
        // outgoing edge; keep the best per component
        std::map<int, CandidateEdge> best;
        for (std::size_t v = 0; v < n; ++v) {
            int c = index.colors[v];
            SearchReport rep = cnns(index, X[v], c, 1, true);
            ++res.cnns_queries;
            const Neighbor& nb = rep.result[0];
            CandidateEdge e{std::min(v, nb.index), std::max(v, nb.index), nb.dist};
            auto [it, fresh] = best.emplace(c, e);
            if (!fresh && e < it->second) it->second = e;
        }
        // merge phase: small-to-large recoloring
        for (const auto& [c, e] : best) {
            int cu = index.colors[e.u], cv = index.colors[e.v];
            if (cu == cv) continue;  // already joined earlier this round
            int big = members[cu].size() >= members[cv].size() ? cu : cv;
            int small = big == cu ? cv : cu;
            res.recolor_events += recolor(index, members[small], big);
            members[big].insert(members[big].end(), members[small].begin(),
                                members[small].end());
            members[small].clear();
            res.edges.push_back({e.u, e.v, e.weight});
            res.total_weight += e.weight;
            --component_count;
        }
    }
    return res;
}

KCenterResult farthest_first(const PointSet& X, const Metric& metric, std::size_t k,
                             std::size_t start_index) {
    const std::size_t n = X.size();
    if (k < 1 || k > n) throw std::invalid_argument("farthest_first: need 1 <= k <= n");
    if (start_index >= n) throw std::out_of_range("farthest_first: bad start index");
    KCenterResult res;
    res.centers.push_back(start_index);
    std::vector<double> mind(n);
    for (std::size_t i = 0; i < n; ++i) mind[i] = distance(metric, X[i], X[start_index]);
    while (res.centers.size() < k) {
        std::size_t z = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (mind[i] > mind[z]) z = i;
        res.centers.push_back(z);
        for (std::size_t i = 0; i < n; ++i)
            mind[i] = std::min(mind[i], distance(metric, X[i], X[z]));
    }
    res.cost = *std::max_element(mind.begin(), mind.end());
    return res;
}

double kcenter_cost(const PointSet& X, const Metric& metric,
                    std::span<const std::size_t> centers) {
    if (centers.empty()) throw std::invalid_argument("kcenter_cost: no centers");
    double cost = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double mind = std::numeric_limits<double>::infinity();
        for (std::size_t c : centers) mind = std::min(mind, distance(metric, X[i], X[c]));
        cost = std::max(cost, mind);
    }
    return cost;
}

TspResult greedy_tsp(const PointSet& X, const Metric& metric, std::size_t start_index) {
    const std::size_t n = X.size();
    if (n == 0) throw std::invalid_argument("greedy_tsp: empty point set");
    if (start_index >= n) throw std::out_of_range("greedy_tsp: bad start index");
    TspResult res;
    std::vector<bool> visited(n, false);
    std::size_t cur = start_index;
    visited[cur] = true;
    res.tour.push_back(cur);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t best = n;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (visited[i]) continue;
            double d = distance(metric, X[cur], X[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        res.length += bd;
        cur = best;
        visited[cur] = true;
        res.tour.push_back(cur);
    }
    if (n > 1) res.length += distance(metric, X[cur], X[start_index]);
    return res;
}

int knn_classify(const PointSet& train, const Metric& metric, std::span<const double> q,
                 std::size_t k, VoteWeighting weighting,
                 const std::map<int, double>* priors) {
    if (!train.labels) throw std::invalid_argument("knn_classify: training labels required");
    if (k == 0) throw std::invalid_argument("knn_classify: k must be positive");
    if (k > train.size()) throw std::invalid_argument("knn_classify: k exceeds n");
    std::vector<Neighbor> nn = brute_nn(metric, q, train, k);
    std::map<int, double> votes;
    for (const Neighbor& nb : nn) {
        int label = (*train.labels)[nb.index];
        switch (weighting) {
            case VoteWeighting::Uniform:
                votes[label] += 1.0;
                break;
            case VoteWeighting::Prior: {
                double w = 1.0;
                if (priors) {
                    auto it = priors->find(label);
                    if (it != priors->end()) w = it->second;
                }
                votes[label] += w;
                break;
            }
            case VoteWeighting::InverseDistance:
                votes[label] += 1.0 / std::max(nb.dist, 1e-12);
                break;
        }
    }
    // map iteration is label-ascending, so strict > keeps the smallest label
    int best_label = votes.begin()->first;
    double best_votes = votes.begin()->second;
    for (const auto& [label, v] : votes) {
        if (v > best_votes) {
            best_votes = v;
            best_label = label;
        }
    }
    return best_label;
}

}  // namespace proxkit
