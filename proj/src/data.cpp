#include "proxkit/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace proxkit {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_real(const std::string& s, std::size_t line_no) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw CsvError(line_no, "non-numeric cell '" + s + "'");
    if (!std::isfinite(value)) throw CsvError(line_no, "non-finite cell '" + s + "'");
    return value;
}

}  // namespace

PointSet parse_csv(const std::string& text, bool has_label) {
    PointSet out;
    if (has_label) out.labels.emplace();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_fields(line);
        if (width == 0) {
            width = fields.size();
            if (has_label && width < 2) throw CsvError(line_no, "row too short for a label");
        } else if (fields.size() != width) {
            throw CsvError(line_no, "ragged row: expected " + std::to_string(width) +
                                        " fields, got " + std::to_string(fields.size()));
        }
        std::size_t coords = has_label ? width - 1 : width;
        std::vector<double> row(coords);
        for (std::size_t i = 0; i < coords; ++i) row[i] = parse_real(fields[i], line_no);
        if (has_label) {
            double lab = parse_real(fields[coords], line_no);
            if (lab != std::floor(lab))
                throw CsvError(line_no, "label is not an integer");
            out.labels->push_back(static_cast<int>(lab));
        }
        out.push_back(row);
    }
    if (out.empty()) throw CsvError(0, "empty input");
    return out;
}

PointSet ingest_csv(const std::string& path, bool has_label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), has_label);
}

void write_csv(const PointSet& X, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[64];
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto row = X[i];
        for (std::size_t d = 0; d < X.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[d]);
            out << (d ? "," : "") << buf;
        }
        if (X.labels) out << ',' << (*X.labels)[i];
        out << '\n';
    }
}

PointSet gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n < 1 || dim < 1) throw std::invalid_argument("gen_uniform: n, dim >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    PointSet out(dim);
    out.data.resize(n * dim);
    for (double& v : out.data) v = unif(rng);
    return out;
}

PointSet gen_two_lines(std::size_t n_a, std::size_t n_b) {
    if (n_a < 1 || n_b < 1) throw std::invalid_argument("gen_two_lines: counts >= 1");
    PointSet out(2);
    for (std::size_t i = 0; i < n_a; ++i)
        out.push_back(std::vector<double>{2.0 * static_cast<double>(i), 0.0});
    for (std::size_t j = 0; j < n_b; ++j)
        out.push_back(std::vector<double>{static_cast<double>(j), 4.0});
    return out;
}

PointSet gen_kd_adversarial(std::size_t n, std::size_t dim, double m_large,
                            std::uint64_t seed) {
    if (n < 1 || dim < 1) throw std::invalid_argument("gen_kd_adversarial: n, dim >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> coord(0, dim - 1);
    PointSet out(dim);
    out.push_back(std::vector<double>(dim, 1.0));
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<double> row(dim);
        for (double& v : row) v = unif(rng);
        row[coord(rng)] = m_large;
        out.push_back(row);
    }
    return out;
}

PointSet generate(const std::string& name, std::size_t n, std::size_t dim,
                  std::uint64_t seed, double m_large, std::size_t n_b) {
    if (name == "uniform") return gen_uniform(n, dim, seed);
    if (name == "two_lines") return gen_two_lines(n, n_b ? n_b : 2 * n - 1);
    if (name == "kd_adversarial") return gen_kd_adversarial(n, dim, m_large, seed);
    throw std::invalid_argument("unknown generator '" + name + "'");
}

JlResult jl_project(const PointSet& X, std::size_t d_target, std::uint64_t seed,
                    bool identity_map) {
    if (d_target < 1 || d_target > X.dim)
        throw std::invalid_argument("jl_project: need 1 <= d_target <= D");
    JlResult res;
    if (identity_map) {
        if (d_target != X.dim)
            throw std::invalid_argument("jl_project: identity map needs d_target == D");
        res.projected = X;
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_target));
        std::vector<double> map(d_target * X.dim);
        for (double& v : map) v = gauss(rng) * scale;
        res.projected.dim = d_target;
        res.projected.labels = X.labels;
        res.projected.colors = X.colors;
        res.projected.data.resize(X.size() * d_target);
        for (std::size_t i = 0; i < X.size(); ++i) {
            auto row = X[i];
            for (std::size_t r = 0; r < d_target; ++r) {
                double s = 0;
                for (std::size_t c = 0; c < X.dim; ++c) s += map[r * X.dim + c] * row[c];
                res.projected.data[i * d_target + r] = s;
            }
        }
    }
    // empirical distortion: all pairs, or a fixed 10^4-pair sample
    const Metric euclid = Metric::euclidean();
    const std::size_t n = X.size();
    std::uint64_t total_pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<std::size_t> pick(0, n ? n - 1 : 0);
    const std::size_t sample_cap = 10000;
    auto measure = [&](std::size_t i, std::size_t j) {
        double orig = distance(euclid, X[i], X[j]);
        if (orig == 0) return;
        double proj = distance(euclid, res.projected[i], res.projected[j]);
        res.max_distortion = std::max(res.max_distortion, std::abs(1.0 - proj / orig));
    };
    if (total_pairs <= sample_cap) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) measure(i, j);
    } else {
        for (std::size_t s = 0; s < sample_cap; ++s) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i != j) measure(i, j);
        }
    }
    return res;
}

}  // namespace proxkit
