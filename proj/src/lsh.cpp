#include "proxkit/lsh.hpp"

#include <cmath>
#include <random>

namespace proxkit {

namespace {

void validate(const LshParams& p) {
    if (p.hashes_per_table < 1 || p.tables < 1)
        throw std::invalid_argument("lsh: k and L must be >= 1");
    if (!(p.near_radius > 0)) throw std::invalid_argument("lsh: R must be positive");
    if (!(p.approximation > 1)) throw std::invalid_argument("lsh: c must exceed 1");
    if (p.family == HashFamily::QuantizedProjection && !(p.bucket_width > 0))
        throw std::invalid_argument("lsh: bucket width must be positive");
}

long long hash_value(const LshParams& p, std::span<const double> g, double b,
                     std::span<const double> x) {
    double proj = 0;
    for (std::size_t i = 0; i < x.size(); ++i) proj += g[i] * x[i];
    if (p.family == HashFamily::SignedProjection) return proj >= 0 ? 1 : 0;
    return static_cast<long long>(std::floor((proj + b) / p.bucket_width));
}

}  // namespace

std::vector<long long> LshIndex::key(std::size_t table, std::span<const double> x) const {
    std::vector<long long> k(params.hashes_per_table);
    for (std::size_t i = 0; i < params.hashes_per_table; ++i)
        k[i] = hash_value(params, directions[table][i], offsets[table][i], x);
    return k;
}

LshIndex lsh_build(const PointSet& X, const LshParams& params) {
    validate(params);
    if (X.empty()) throw std::invalid_argument("lsh_build: empty point set");
    LshIndex index;
    index.params = params;
    index.points = X;
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, params.bucket_width);
    index.directions.resize(params.tables);
    index.offsets.resize(params.tables);
    index.tables.resize(params.tables);
    for (std::size_t t = 0; t < params.tables; ++t) {
        index.directions[t].resize(params.hashes_per_table);
        index.offsets[t].resize(params.hashes_per_table);
        for (std::size_t i = 0; i < params.hashes_per_table; ++i) {
            index.directions[t][i].resize(X.dim);
            for (double& v : index.directions[t][i]) v = gauss(rng);
            index.offsets[t][i] =
                params.family == HashFamily::QuantizedProjection ? unif(rng) : 0.0;
        }
    }
    for (std::size_t p = 0; p < X.size(); ++p)
        for (std::size_t t = 0; t < params.tables; ++t)
            index.tables[t][index.key(t, X[p])].push_back(p);
    return index;
}

LshAnswer lsh_query(const LshIndex& index, std::span<const double> q) {
    LshAnswer ans;
    const Metric euclid = Metric::euclidean();
    double threshold = index.params.approximation * index.params.near_radius;
    for (std::size_t t = 0; t < index.params.tables; ++t) {
        auto it = index.tables[t].find(index.key(t, q));
        if (it == index.tables[t].end()) continue;
        for (std::size_t p : it->second) {
            ++ans.comparisons;
            double d = distance(euclid, q, index.points[p]);
            if (d <= threshold) {
                ans.hit = Neighbor{p, d};
                return ans;
            }
        }
    }
    return ans;
}

double lsh_collision_rate(const LshParams& params, std::span<const double> a,
                          std::span<const double> b, std::size_t trials,
                          std::uint64_t seed) {
    validate(params);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, params.bucket_width);
    std::vector<double> g(a.size());
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : g) v = gauss(rng);
        double off = params.family == HashFamily::QuantizedProjection ? unif(rng) : 0.0;
        if (hash_value(params, g, off, a) == hash_value(params, g, off, b)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace proxkit
