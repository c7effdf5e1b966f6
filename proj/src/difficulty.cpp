#include "proxkit/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace proxkit {

namespace {

// ratio with the coincident-point conventions: a zero denominator can only
// pair with a zero numerator (sorted order), and that term counts as 1
double ratio_term(double numerator, double denominator) {
    if (denominator == 0.0) return 1.0;
    return numerator / denominator;
}

double phi_value(std::span<const Neighbor> sorted, std::size_t k, std::size_t m,
                 std::size_t* n_terms) {
    double num = 0;
    for (std::size_t i = 0; i < k; ++i) num += sorted[i].dist;
    num /= static_cast<double>(k);
    double s = 0;
    for (std::size_t i = k; i < m; ++i) s += ratio_term(num, sorted[i].dist);
    if (n_terms) *n_terms = m - k;
    return s / static_cast<double>(m);
}

}  // namespace

PotentialReport phi(std::span<const double> q, const PointSet& X, const Metric& metric,
                    PhiVariant variant, std::size_t k, std::size_t m) {
    const std::size_t n = X.size();
    if (variant == PhiVariant::PhiN) {
        if (n < 2) throw std::invalid_argument("phi: need at least two points");
        k = 1;
        m = n;
    } else {
        if (variant == PhiVariant::PhiM) k = 1;
        if (m == 0) m = n;
        if (m > n) throw std::invalid_argument("phi: m exceeds |X|");
        if (k >= m) throw std::invalid_argument("phi: require k < m");
    }
    std::vector<Neighbor> sorted = brute_nn(metric, q, X, n);
    PotentialReport rep;
    rep.variant = variant;
    rep.k = k;
    rep.m = m;
    rep.phi = phi_value(sorted, k, m, &rep.n_terms);
    return rep;
}

namespace {

double phi2_value(const PointSet& Q, const Metric& metric, Phi2Rule rule,
                  std::span<const std::size_t> idx) {
    if (idx.size() < 2) return 0.0;
    double out = 0;
    const double n2 = static_cast<double>(idx.size()) * static_cast<double>(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            double d = distance(metric, Q[idx[a]], Q[idx[b]]);
            if (rule == Phi2Rule::MeanInterpoint)
                out += d / n2;
            else
                out = std::max(out, d);
        }
    return out;
}

}  // namespace

BatchPotentialReport batch_phi(const PointSet& Q, const PointSet& X, const Metric& metric,
                               std::size_t k, std::size_t m, Phi2Rule rule) {
    if (Q.empty()) throw std::invalid_argument("batch_phi: empty query set");
    BatchPotentialReport rep;
    rep.phi2_rule = rule;
    for (std::size_t i = 0; i < Q.size(); ++i)
        rep.phi1 += phi(Q[i], X, metric, PhiVariant::PhiKM, k, m).phi;
    std::vector<std::size_t> all(Q.size());
    std::iota(all.begin(), all.end(), 0);
    rep.phi2 = phi2_value(Q, metric, rule, all);
    rep.product = rep.phi1 * rep.phi2;
    if (rep.phi1 > 0 && rep.phi1 < 1)
        rep.bound = rep.phi1 * rep.phi2 * std::log(1.0 / rep.phi1);
    return rep;
}

std::vector<ScheduledQuery> batch_schedule(const PointSet& Q, const PointSet& X,
                                           const Metric& metric, std::size_t k,
                                           std::size_t m) {
    std::vector<double> pkm(Q.size());
    for (std::size_t i = 0; i < Q.size(); ++i)
        pkm[i] = phi(Q[i], X, metric, PhiVariant::PhiKM, k, m).phi;
    std::vector<std::size_t> remaining(Q.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<ScheduledQuery> out;
    out.reserve(Q.size());
    while (!remaining.empty()) {
        double spread = phi2_value(Q, metric, Phi2Rule::Diameter, remaining);
        std::size_t pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < remaining.size(); ++j) {
            double p = pkm[remaining[j]];
            double score = p > 0 ? p * spread * std::log(1.0 / p) : 0.0;
            if (score < best) {
                best = score;
                pick = j;
            }
        }
        std::size_t q = remaining[pick];
        remaining.erase(remaining.begin() + pick);
        out.push_back({q, brute_nn(metric, Q[q], X, k)});
    }
    return out;
}

}  // namespace proxkit
