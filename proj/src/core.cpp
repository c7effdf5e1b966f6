#include "proxkit/core.hpp"

#include <algorithm>
#include <cmath>

namespace proxkit {

PointSet PointSet::subset(std::span<const std::size_t> idx) const {
    PointSet out(dim);
    out.data.reserve(idx.size() * dim);
    if (labels) out.labels.emplace();
    if (colors) out.colors.emplace();
    for (std::size_t i : idx) {
        auto row = (*this)[i];
        out.data.insert(out.data.end(), row.begin(), row.end());
        if (labels) out.labels->push_back((*labels)[i]);
        if (colors) out.colors->push_back((*colors)[i]);
    }
    return out;
}

Metric Metric::minkowski(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("Minkowski exponent must be >= 1");
    return {MetricKind::Minkowski, p};
}

std::string Metric::name() const {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::KLDivergence: return "kl";
        case MetricKind::Minkowski: return "minkowski:" + std::to_string(p);
    }
    return "?";
}

double distance(const Metric& m, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("distance: dimension mismatch");
    switch (m.kind) {
        case MetricKind::Euclidean: {
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                double d = a[i] - b[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case MetricKind::Minkowski: {
            if (m.p == 2.0) return distance(Metric::euclidean(), a, b);
            if (m.p == 1.0) {
                double s = 0;
                for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
                return s;
            }
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += std::pow(std::abs(a[i] - b[i]), m.p);
            return std::pow(s, 1.0 / m.p);
        }
        case MetricKind::KLDivergence: {
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] <= 0.0 || b[i] <= 0.0)
                    throw std::domain_error("KL divergence requires strictly positive coordinates");
                s += a[i] * std::log(a[i] / b[i]);
            }
            // Gibbs' inequality gives s >= 0 for probability vectors; clamp
            // the rounding residue so callers can rely on nonnegativity.
            return std::max(s, 0.0);
        }
    }
    throw std::logic_error("unreachable metric kind");
}

std::vector<Neighbor> brute_nn(const Metric& m, std::span<const double> q,
                               const PointSet& X, std::size_t k) {
    if (X.empty()) throw std::invalid_argument("brute_nn: empty point set");
    std::vector<Neighbor> all;
    all.reserve(X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        all.push_back({i, distance(m, q, X[i])});
    std::size_t kk = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + kk, all.end(), neighbor_less);
    all.resize(kk);
    return all;
}

Neighbor brute_fn(const Metric& m, std::span<const double> q, const PointSet& X) {
    if (X.empty()) throw std::invalid_argument("brute_fn: empty point set");
    Neighbor best{0, distance(m, q, X[0])};
    for (std::size_t i = 1; i < X.size(); ++i) {
        double d = distance(m, q, X[i]);
        if (d > best.dist) best = {i, d};
    }
    return best;
}

}  // namespace proxkit
