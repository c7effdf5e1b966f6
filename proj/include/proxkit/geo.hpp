#pragma once

#include <map>
#include <tuple>

#include "proxkit/chromatic.hpp"

namespace proxkit {

struct EmstEdge {
    std::size_t u = 0, v = 0;  // u < v
    double weight = 0.0;
};

struct EmstResult {
    std::vector<EmstEdge> edges;  // n - 1 edges
    double total_weight = 0.0;
    std::size_t cnns_queries = 0;
    std::size_t recolor_events = 0;
    std::size_t rounds = 0;
};

/// Boruvka's algorithm driven by exact chromatic NNS queries over a single
/// tree whose colors are component ids; merges recolor the smaller side.
EmstResult emst_boruvka(const PointSet& X, const Metric& metric, const TreeConfig& cfg);

struct KCenterResult {
    std::vector<std::size_t> centers;
    double cost = 0.0;
};

/// Gonzalez's farthest-first traversal (2-approximation, centers from data).
KCenterResult farthest_first(const PointSet& X, const Metric& metric, std::size_t k,
                             std::size_t start_index = 0);

double kcenter_cost(const PointSet& X, const Metric& metric,
                    std::span<const std::size_t> centers);

struct TspResult {
    std::vector<std::size_t> tour;  // permutation starting at start_index
    double length = 0.0;            // closing edge included
};

TspResult greedy_tsp(const PointSet& X, const Metric& metric, std::size_t start_index = 0);

enum class VoteWeighting { Uniform, Prior, InverseDistance };

/// Exact k-NN vote; label ties go to the smallest label. Prior weighting
/// multiplies each label's vote count by priors[label] (default 1).
int knn_classify(const PointSet& train, const Metric& metric, std::span<const double> q,
                 std::size_t k, VoteWeighting weighting = VoteWeighting::Uniform,
                 const std::map<int, double>* priors = nullptr);

}  // namespace proxkit
