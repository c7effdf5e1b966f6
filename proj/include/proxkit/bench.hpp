#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "proxkit/data.hpp"
#include "proxkit/lsh.hpp"
#include "proxkit/tree.hpp"

namespace proxkit {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One experiment sweep: dataset x tree kinds x spill values x leaf sizes.
struct ExperimentConfig {
    // dataset: either a CSV path or a generator name with params
    std::string dataset = "uniform";
    bool dataset_is_file = false;
    bool has_label = false;
    std::size_t n = 200;
    std::size_t dim = 4;
    double m_large = 100.0;

    Metric metric = Metric::euclidean();
    std::vector<SplitKind> tree_kinds = {SplitKind::KdMaxVariance};
    std::vector<double> spills = {0.0, 0.05, 0.1};  // fractions of the node size
    std::vector<std::size_t> leaf_sizes = {8};

    std::size_t k_rank = 2;    // neighbors scored by summed ranks
    std::size_t k_class = 10;  // classification vote size
    std::size_t queries = 50;  // dataset points sampled as queries
    std::uint64_t seed = 0;

    std::size_t jl_dim = 0;  // 0 disables the projection step
    std::optional<LshParams> lsh = {};

    std::string out = "bench";  // writes out + ".csv" and out + ".json"
};

/// Flat key=value text, '#' comments; unknown keys and malformed values
/// raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Metric parse_metric(const std::string& text);
SplitKind parse_split_kind(const std::string& text);
std::string split_kind_name(SplitKind kind);

struct ResultRow {
    std::string tree;
    double spill = 0.0;
    std::size_t leaf_size = 0;
    double mean_comparisons = 0.0;
    double mean_rank_ratio = 0.0;
    double recall_at_k = 0.0;
    std::optional<double> classification_error = {};  // needs labels
    double wall_time = 0.0;  // seconds; reported, never written to files
};

/// (1 + 2 + ... + k) / (sum of 1-based brute-force ranks of the returned
/// points). Ranks are taken in brute_nn order with `exclude` removed first.
double rank_ratio(const Metric& metric, std::span<const double> q, const PointSet& X,
                  std::span<const std::size_t> returned,
                  std::optional<std::size_t> exclude = {});

struct ExperimentResult {
    std::vector<ResultRow> rows;
    double jl_distortion = 0.0;  // 0 when no projection ran
    std::string csv;             // "benchfmt/1"
    std::string json;
};

/// Runs the sweep with defeatist queries against the brute oracle, then
/// writes cfg.out + ".csv" / ".json" when write_files is set. Output bytes
/// depend only on the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true);

}  // namespace proxkit
