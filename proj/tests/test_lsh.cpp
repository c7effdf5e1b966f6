#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "proxkit/lsh.hpp"

using namespace proxkit;

TEST_CASE("build determinism and key structure") {
    PointSet X = oracles::random_points(30, 4, 3);
    X.push_back(X.point(0));  // duplicate of point 0
    LshParams params;
    params.seed = 5;
    LshIndex a = lsh_build(X, params);
    LshIndex b = lsh_build(X, params);
    for (std::size_t t = 0; t < params.tables; ++t) {
        CHECK(a.tables[t] == b.tables[t]);
        CHECK(a.key(t, X[0]) == a.key(t, X[X.size() - 1]));
        // every point hashed exactly once per table
        std::size_t total = 0;
        for (const auto& [key, bucket] : a.tables[t]) total += bucket.size();
        CHECK(total == X.size());
    }
}

TEST_CASE("signed projection on 1-D data yields at most two buckets") {
    PointSet X(1);
    for (int i = -5; i <= 5; ++i) X.push_back(std::vector<double>{static_cast<double>(i)});
    LshParams params;
    params.family = HashFamily::SignedProjection;
    params.tables = 1;
    params.hashes_per_table = 1;
    LshIndex index = lsh_build(X, params);
    CHECK(index.tables[0].size() <= 2);
}

TEST_CASE("query postconditions") {
    PointSet X = oracles::random_points(50, 3, 11);
    LshParams params;
    params.near_radius = 0.3;
    params.approximation = 2.0;
    params.bucket_width = 0.3;
    params.seed = 2;
    LshIndex index = lsh_build(X, params);

    // membership query: same bucket in every table, distance 0
    LshAnswer self = lsh_query(index, X[7]);
    REQUIRE(self.hit.has_value());
    CHECK(self.hit->dist == 0.0);

    // everything far away: no answer regardless of collisions
    std::vector<double> far{100, 100, 100};
    LshAnswer none = lsh_query(index, far);
    CHECK_FALSE(none.hit.has_value());

    // whenever an answer exists it satisfies the cR filter
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-0.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q{unif(rng), unif(rng), unif(rng)};
        LshAnswer ans = lsh_query(index, q);
        if (ans.hit)
            CHECK(ans.hit->dist <= params.approximation * params.near_radius + 1e-12);
    }
}

TEST_CASE("antipodal unit vectors almost never collide under signed hashing") {
    LshParams params;
    params.family = HashFamily::SignedProjection;
    std::vector<double> a{1, 0, 0}, b{-1, 0, 0};
    double rate = lsh_collision_rate(params, a, b, 10000, 7);
    CHECK(rate <= 0.02);  // theory: 1 - theta/pi = 0 at theta = pi
    // and aligned vectors always collide
    CHECK(lsh_collision_rate(params, a, a, 10000, 7) == doctest::Approx(1.0));
}

TEST_CASE("collision probability decreases with distance") {
    LshParams params;
    params.bucket_width = 1.0;
    std::vector<double> origin{0, 0};
    double prev = 1.1;
    for (double d : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        std::vector<double> p{d, 0};
        double rate = lsh_collision_rate(params, origin, p, 20000, 23);
        CHECK(rate <= prev + 0.02);  // Monte Carlo slack
        prev = rate;
    }
}

TEST_CASE("sensitivity gap for quantized projection") {
    // planted pairs at distance R and 2R with r = R
    LshParams params;
    params.bucket_width = 1.0;
    params.near_radius = 1.0;
    params.approximation = 2.0;
    std::vector<double> origin{0, 0, 0};
    std::vector<double> near{1, 0, 0};   // d = R
    std::vector<double> far{2, 0, 0};    // d = cR
    double p1 = lsh_collision_rate(params, origin, near, 10000, 31);
    double p2 = lsh_collision_rate(params, origin, far, 10000, 31);
    CHECK(p1 - p2 >= 0.05);
}

TEST_CASE("parameter validation") {
    PointSet X = oracles::random_points(5, 2, 1);
    LshParams bad;
    bad.tables = 0;
    CHECK_THROWS_AS(lsh_build(X, bad), std::invalid_argument);
    bad = LshParams{};
    bad.approximation = 1.0;
    CHECK_THROWS_AS(lsh_build(X, bad), std::invalid_argument);
    bad = LshParams{};
    bad.bucket_width = 0.0;
    CHECK_THROWS_AS(lsh_build(X, bad), std::invalid_argument);
    bad = LshParams{};
    bad.near_radius = -1;
    CHECK_THROWS_AS(lsh_build(X, bad), std::invalid_argument);
    PointSet empty(2);
    CHECK_THROWS(lsh_build(empty, LshParams{}));
}
