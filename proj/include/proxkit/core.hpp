#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace proxkit {

using Point = std::vector<double>;

/// Row-major dataset of D-dimensional points with optional labels and colors.
struct PointSet {
    std::size_t dim = 0;
    std::vector<double> data;
    std::optional<std::vector<int>> labels;
    std::optional<std::vector<int>> colors;

    PointSet() = default;
    explicit PointSet(std::size_t d) : dim(d) {}

    std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
    bool empty() const { return data.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {data.data() + i * dim, dim};
    }

    Point point(std::size_t i) const {
        auto row = (*this)[i];
        return Point(row.begin(), row.end());
    }

    void push_back(std::span<const double> p) {
        if (dim == 0) dim = p.size();
        if (p.size() != dim)
            throw std::invalid_argument("PointSet: dimension mismatch on insert");
        data.insert(data.end(), p.begin(), p.end());
    }

    /// Subset copy in the given index order (labels/colors carried along).
    PointSet subset(std::span<const std::size_t> idx) const;
};

enum class MetricKind { Minkowski, Euclidean, KLDivergence };

/// Tagged distance functional. KL is not a true metric and is rejected by
/// the tree modules; brute-force and difficulty ops accept it.
struct Metric {
    MetricKind kind = MetricKind::Euclidean;
    double p = 2.0;  // Minkowski exponent

    bool is_true_metric() const { return kind != MetricKind::KLDivergence; }

    static Metric euclidean() { return {MetricKind::Euclidean, 2.0}; }
    static Metric minkowski(double p);
    static Metric kl() { return {MetricKind::KLDivergence, 0.0}; }

    std::string name() const;
};

double distance(const Metric& m, std::span<const double> a, std::span<const double> b);

struct Neighbor {
    std::size_t index = 0;
    double dist = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// (distance, index) ordering: the tie rule used everywhere in this library.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
}

/// Exhaustive k-nearest scan, nondecreasing distance, ties by smaller index.
std::vector<Neighbor> brute_nn(const Metric& m, std::span<const double> q,
                               const PointSet& X, std::size_t k);

/// Exhaustive farthest neighbor; its distance is the radius of the minimum
/// enclosing ball centered at q. Ties broken by smaller index.
Neighbor brute_fn(const Metric& m, std::span<const double> q, const PointSet& X);

}  // namespace proxkit
