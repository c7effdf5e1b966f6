#pragma once

#include <optional>

#include "proxkit/core.hpp"

namespace proxkit {

enum class PhiVariant { PhiN, PhiM, PhiKM };

enum class Phi2Rule { MeanInterpoint, Diameter };

struct PotentialReport {
    double phi = 0.0;
    std::size_t n_terms = 0;
    PhiVariant variant = PhiVariant::PhiN;
    std::size_t k = 1, m = 0;
};

/// Difficulty potential of a single query: mean ratio of the nearest
/// distance(s) to each other distance; near 1 is hard, near 0 is easy.
/// PhiN sums i = 2..n with 1/n; PhiM restricts to the m nearest with k = 1;
/// PhiKM uses the mean of the first k distances as numerator.
PotentialReport phi(std::span<const double> q, const PointSet& X, const Metric& metric,
                    PhiVariant variant = PhiVariant::PhiN, std::size_t k = 1,
                    std::size_t m = 0);

struct BatchPotentialReport {
    double phi1 = 0.0;  // sum of per-query phi_{k,m}
    double phi2 = 0.0;  // query-set spread, distance units
    Phi2Rule phi2_rule = Phi2Rule::MeanInterpoint;
    double product = 0.0;                   // phi1 * phi2
    std::optional<double> bound = {};       // phi1 phi2 log(1/phi1), when defined
};

BatchPotentialReport batch_phi(const PointSet& Q, const PointSet& X, const Metric& metric,
                               std::size_t k, std::size_t m,
                               Phi2Rule rule = Phi2Rule::MeanInterpoint);

struct ScheduledQuery {
    std::size_t query_index = 0;
    std::vector<Neighbor> answer;  // brute k-NN
};

/// Easiest-first batch order: repeatedly removes the query minimizing
/// phi_{k,m}(q) * phi2(remaining) * log(1/phi_{k,m}(q)) and answers it by
/// linear scan.
std::vector<ScheduledQuery> batch_schedule(const PointSet& Q, const PointSet& X,
                                           const Metric& metric, std::size_t k,
                                           std::size_t m);

}  // namespace proxkit
