#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "proxkit/core.hpp"

namespace proxkit {

enum class HashFamily { SignedProjection, QuantizedProjection };

struct LshParams {
    HashFamily family = HashFamily::QuantizedProjection;
    double bucket_width = 1.0;  // r, QuantizedProjection only
    std::size_t hashes_per_table = 4;  // k
    std::size_t tables = 8;            // L
    double near_radius = 1.0;          // R
    double approximation = 2.0;        // c > 1
    std::uint64_t seed = 0;
};

struct LshIndex {
    LshParams params;
    PointSet points;
    // per table: k projection directions and offsets
    std::vector<std::vector<std::vector<double>>> directions;  // [L][k][D]
    std::vector<std::vector<double>> offsets;                  // [L][k]
    // exact k-tuple keys; bucket lists hold point indices in insertion order
    std::vector<std::map<std::vector<long long>, std::vector<std::size_t>>> tables;

    std::vector<long long> key(std::size_t table, std::span<const double> x) const;
};

LshIndex lsh_build(const PointSet& X, const LshParams& params);

struct LshAnswer {
    std::optional<Neighbor> hit;  // first retrieved point with d <= cR
    std::size_t comparisons = 0;
};

/// Scans buckets g_1(q) .. g_L(q) in table order, whole bucket before the
/// next table; "no hit" is a valid outcome.
LshAnswer lsh_query(const LshIndex& index, std::span<const double> q);

/// Collision probability of a single hash draw on the pair (a, b),
/// estimated over `trials` independent hash functions.
double lsh_collision_rate(const LshParams& params, std::span<const double> a,
                          std::span<const double> b, std::size_t trials,
                          std::uint64_t seed);

}  // namespace proxkit
