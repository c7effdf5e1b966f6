#pragma once

// Independent reference implementations the library is checked against.
// Deliberately naive: correctness over speed.

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "proxkit/core.hpp"

namespace oracles {

using proxkit::Metric;
using proxkit::Neighbor;
using proxkit::PointSet;

inline PointSet random_points(std::size_t n, std::size_t dim, std::uint64_t seed,
                              double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    PointSet out(dim);
    out.data.resize(n * dim);
    for (double& v : out.data) v = unif(rng);
    return out;
}

// O(n^2) Prim over the complete graph
inline double prim_mst_weight(const PointSet& X, const Metric& m) {
    const std::size_t n = X.size();
    if (n < 2) return 0.0;
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    best[0] = 0.0;
    double total = 0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_tree[i] && (u == n || best[i] < best[u])) u = i;
        in_tree[u] = true;
        total += best[u];
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v]) best[v] = std::min(best[v], distance(m, X[u], X[v]));
    }
    return total;
}

inline double kcenter_cost_of(const PointSet& X, const Metric& m,
                              const std::vector<std::size_t>& centers) {
    double cost = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t c : centers) nearest = std::min(nearest, distance(m, X[i], X[c]));
        cost = std::max(cost, nearest);
    }
    return cost;
}

// exhaustive over all C(n, k) center subsets; n <= 12, k <= 3 only
inline double optimal_kcenter_cost(const PointSet& X, const Metric& m, std::size_t k) {
    const std::size_t n = X.size();
    std::vector<std::size_t> pick(k);
    double best = std::numeric_limits<double>::infinity();
    auto recurse = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
        if (depth == k) {
            best = std::min(best, kcenter_cost_of(X, m, pick));
            return;
        }
        for (std::size_t i = from; i < n; ++i) {
            pick[depth] = i;
            self(self, depth + 1, i + 1);
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

// exhaustive tour over permutations fixing index 0; n <= 8 only
inline double optimal_tsp_length(const PointSet& X, const Metric& m) {
    const std::size_t n = X.size();
    if (n < 2) return 0.0;
    std::vector<std::size_t> perm(n - 1);
    std::iota(perm.begin(), perm.end(), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        double len = distance(m, X[0], X[perm.front()]);
        for (std::size_t i = 0; i + 1 < perm.size(); ++i)
            len += distance(m, X[perm[i]], X[perm[i + 1]]);
        len += distance(m, X[perm.back()], X[0]);
        best = std::min(best, len);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// linear scan restricted to points whose color differs from q_color
inline std::vector<Neighbor> brute_cnns(const Metric& m, std::span<const double> q,
                                        const PointSet& X, const std::vector<int>& colors,
                                        int q_color, std::size_t k) {
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (colors[i] != q_color) all.push_back({i, distance(m, q, X[i])});
    std::sort(all.begin(), all.end(), proxkit::neighbor_less);
    if (all.size() > k) all.resize(k);
    return all;
}

inline double spearman_rho(std::vector<double> a, std::vector<double> b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t pos = 0; pos < order.size();) {
            std::size_t end = pos;
            while (end < order.size() && v[order[end]] == v[order[pos]]) ++end;
            double mean_rank = (static_cast<double>(pos) + static_cast<double>(end - 1)) / 2;
            for (std::size_t i = pos; i < end; ++i) r[order[i]] = mean_rank;
            pos = end;
        }
        return r;
    };
    std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0 || db == 0) return 0;
    return num / std::sqrt(da * db);
}

}  // namespace oracles
