#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "proxkit/core.hpp"

namespace proxkit::detail {

inline double dot(std::span<const double> w, std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// ||w||_{p'} with 1/p + 1/p' = 1: scales a split margin into a valid lower
// bound on the Minkowski-p distance across the plane.
inline double dual_norm(std::span<const double> w, const Metric& m) {
    double p = (m.kind == MetricKind::Euclidean) ? 2.0 : m.p;
    if (p == 2.0) return norm2(w);
    if (p == 1.0) {
        double mx = 0;
        for (double v : w) mx = std::max(mx, std::abs(v));
        return mx;
    }
    double pp = p / (p - 1.0);
    double s = 0;
    for (double v : w) s += std::pow(std::abs(v), pp);
    return std::pow(s, 1.0 / pp);
}

// Bounded best-k under (distance, index) order; duplicate indices rejected,
// so spill duplicates cannot appear twice in a result.
struct TopK {
    std::size_t k = 1;
    std::vector<Neighbor> heap;  // max-heap under neighbor_less

    bool full() const { return heap.size() >= k; }
    double bound() const {
        return full() ? heap.front().dist : std::numeric_limits<double>::infinity();
    }
    void offer(Neighbor n) {
        for (const Neighbor& h : heap)
            if (h.index == n.index) return;
        if (!full()) {
            heap.push_back(n);
            std::push_heap(heap.begin(), heap.end(), neighbor_less);
        } else if (neighbor_less(n, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), neighbor_less);
            heap.back() = n;
            std::push_heap(heap.begin(), heap.end(), neighbor_less);
        }
    }
    std::vector<Neighbor> sorted() && {
        std::sort(heap.begin(), heap.end(), neighbor_less);
        return std::move(heap);
    }
};

}  // namespace proxkit::detail
