#pragma once

#include <cstdint>
#include <string>

#include "proxkit/core.hpp"

namespace proxkit {

struct CsvError : std::runtime_error {
    std::size_t line;
    CsvError(std::size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

/// Rows of comma-separated reals, optional trailing integer label. No header
/// support: a header row fails with a line-1 parse error.
PointSet ingest_csv(const std::string& path, bool has_label);
PointSet parse_csv(const std::string& text, bool has_label);

void write_csv(const PointSet& X, const std::string& path);

PointSet gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Two parallel lines at y = 0 (spacing 2) and y = 4 (spacing 1); the PCA
/// failure dataset. Defaults keep the two x-means equal so the principal
/// direction is exactly the first axis.
PointSet gen_two_lines(std::size_t n_a = 32, std::size_t n_b = 63);

/// x_0 = (1,...,1); every other point is uniform on [0,1]^D with one random
/// coordinate set to the large constant M. Coordinate splits separate any
/// query near the unit cube from x_0.
PointSet gen_kd_adversarial(std::size_t n, std::size_t dim, double m_large,
                            std::uint64_t seed);

/// Dispatch by generator name ("uniform", "two_lines", "kd_adversarial").
PointSet generate(const std::string& name, std::size_t n, std::size_t dim,
                  std::uint64_t seed, double m_large = 100.0, std::size_t n_b = 0);

struct JlResult {
    PointSet projected;
    double max_distortion = 0.0;  // max |1 - ||f(x)-f(y)|| / ||x-y|||
};

/// Gaussian random projection scaled by 1/sqrt(d_target); distortion is
/// measured over all pairs, or a 10^4-pair sample for large n.
/// identity_map is a test mode that projects with the identity instead.
JlResult jl_project(const PointSet& X, std::size_t d_target, std::uint64_t seed,
                    bool identity_map = false);

}  // namespace proxkit
