#include "proxkit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "proxkit/geo.hpp"

namespace proxkit {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double to_real(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
}

std::size_t to_count(const std::string& key, const std::string& s) {
    double v = to_real(key, s);
    if (v < 0 || v != std::floor(v))
        throw ConfigError(key + ": expected a nonnegative integer, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

Metric parse_metric(const std::string& text) {
    if (text == "euclidean") return Metric::euclidean();
    if (text == "kl") return Metric::kl();
    if (text.rfind("minkowski:", 0) == 0) {
        double p = to_real("metric", text.substr(10));
        if (!(p >= 1)) throw ConfigError("metric: minkowski exponent must be >= 1");
        return Metric::minkowski(p);
    }
    throw ConfigError("metric: expected euclidean, kl, or minkowski:p, got '" + text + "'");
}

SplitKind parse_split_kind(const std::string& text) {
    if (text == "kd") return SplitKind::KdMaxVariance;
    if (text == "rp") return SplitKind::RandomProjection;
    if (text == "pca") return SplitKind::Pca;
    if (text == "twomeans") return SplitKind::TwoMeans;
    throw ConfigError("trees: expected kd, rp, pca, or twomeans, got '" + text + "'");
}

std::string split_kind_name(SplitKind kind) {
    switch (kind) {
        case SplitKind::KdMaxVariance: return "kd";
        case SplitKind::RandomProjection: return "rp";
        case SplitKind::Pca: return "pca";
        case SplitKind::TwoMeans: return "twomeans";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    LshParams lsh;
    bool lsh_seen = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key == "dataset") {
            cfg.dataset = val;
            cfg.dataset_is_file = val != "uniform" && val != "two_lines" &&
                                  val != "kd_adversarial";
        } else if (key == "has_label") {
            cfg.has_label = to_count(key, val) != 0;
        } else if (key == "n") {
            cfg.n = to_count(key, val);
        } else if (key == "dim") {
            cfg.dim = to_count(key, val);
        } else if (key == "m_large") {
            cfg.m_large = to_real(key, val);
        } else if (key == "metric") {
            cfg.metric = parse_metric(val);
        } else if (key == "trees") {
            cfg.tree_kinds.clear();
            for (const std::string& t : split_list(val))
                cfg.tree_kinds.push_back(parse_split_kind(t));
        } else if (key == "spills") {
            cfg.spills.clear();
            for (const std::string& t : split_list(val)) cfg.spills.push_back(to_real(key, t));
        } else if (key == "leaf_sizes") {
            cfg.leaf_sizes.clear();
            for (const std::string& t : split_list(val))
                cfg.leaf_sizes.push_back(to_count(key, t));
        } else if (key == "k_rank") {
            cfg.k_rank = to_count(key, val);
        } else if (key == "k_class") {
            cfg.k_class = to_count(key, val);
        } else if (key == "queries") {
            cfg.queries = to_count(key, val);
        } else if (key == "seed") {
            cfg.seed = to_count(key, val);
        } else if (key == "jl_dim") {
            cfg.jl_dim = to_count(key, val);
        } else if (key == "out") {
            cfg.out = val;
        } else if (key == "lsh_family") {
            lsh.family = val == "signed" ? HashFamily::SignedProjection
                                         : HashFamily::QuantizedProjection;
            if (val != "signed" && val != "quantized")
                throw ConfigError("lsh_family: expected signed or quantized");
            lsh_seen = true;
        } else if (key == "lsh_bucket_width") {
            lsh.bucket_width = to_real(key, val);
            lsh_seen = true;
        } else if (key == "lsh_hashes") {
            lsh.hashes_per_table = to_count(key, val);
            lsh_seen = true;
        } else if (key == "lsh_tables") {
            lsh.tables = to_count(key, val);
            lsh_seen = true;
        } else if (key == "lsh_radius") {
            lsh.near_radius = to_real(key, val);
            lsh_seen = true;
        } else if (key == "lsh_approximation") {
            lsh.approximation = to_real(key, val);
            lsh_seen = true;
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
    }
    for (double s : cfg.spills)
        if (s < 0 || s >= 0.5) throw ConfigError("spills: values must lie in [0, 0.5)");
    for (std::size_t ls : cfg.leaf_sizes)
        if (ls < 1) throw ConfigError("leaf_sizes: values must be >= 1");
    if (cfg.tree_kinds.empty()) throw ConfigError("trees: empty list");
    if (cfg.k_rank < 1 || cfg.k_class < 1) throw ConfigError("k_rank, k_class: must be >= 1");
    if (cfg.queries < 1) throw ConfigError("queries: must be >= 1");
    if (lsh_seen) {
        lsh.seed = cfg.seed;
        cfg.lsh = lsh;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

double rank_ratio(const Metric& metric, std::span<const double> q, const PointSet& X,
                  std::span<const std::size_t> returned,
                  std::optional<std::size_t> exclude) {
    if (returned.empty()) throw std::invalid_argument("rank_ratio: nothing returned");
    std::vector<Neighbor> order = brute_nn(metric, q, X, X.size());
    std::vector<std::size_t> rank(X.size(), 0);
    std::size_t r = 0;
    for (const Neighbor& nb : order) {
        if (exclude && nb.index == *exclude) continue;
        rank[nb.index] = ++r;
    }
    double ideal = 0, actual = 0;
    std::size_t pos = 0;
    for (std::size_t idx : returned) {
        if (idx >= X.size() || rank[idx] == 0)
            throw std::invalid_argument("rank_ratio: returned index not rankable");
        ideal += static_cast<double>(++pos);
        actual += static_cast<double>(rank[idx]);
    }
    return ideal / actual;
}

namespace {

// defeatist result with the query point itself removed, truncated to k
std::vector<std::size_t> query_without_self(const SpatialTree& tree, std::size_t qi,
                                            std::size_t k, std::size_t& comparisons) {
    SearchReport rep = defeatist_nns(tree, tree.points[qi], k + 1);
    comparisons += rep.comparisons;
    std::vector<std::size_t> out;
    for (const Neighbor& nb : rep.result) {
        if (nb.index == qi) continue;
        out.push_back(nb.index);
        if (out.size() == k) break;
    }
    return out;
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["dataset"] = cfg.dataset;
    j["has_label"] = cfg.has_label;
    j["n"] = cfg.n;
    j["dim"] = cfg.dim;
    j["m_large"] = cfg.m_large;
    j["metric"] = cfg.metric.name();
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (SplitKind k : cfg.tree_kinds) trees.push_back(split_kind_name(k));
    j["trees"] = trees;
    j["spills"] = cfg.spills;
    j["leaf_sizes"] = cfg.leaf_sizes;
    j["k_rank"] = cfg.k_rank;
    j["k_class"] = cfg.k_class;
    j["queries"] = cfg.queries;
    j["seed"] = cfg.seed;
    j["jl_dim"] = cfg.jl_dim;
    return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files) {
    PointSet X = cfg.dataset_is_file
                     ? ingest_csv(cfg.dataset, cfg.has_label)
                     : generate(cfg.dataset, cfg.n, cfg.dim, cfg.seed, cfg.m_large);
    if (X.size() < 2) throw ConfigError("dataset too small for queries");

    ExperimentResult res;
    if (cfg.jl_dim > 0) {
        JlResult jl = jl_project(X, cfg.jl_dim, cfg.seed);
        res.jl_distortion = jl.max_distortion;
        X = std::move(jl.projected);
    }

    const std::size_t n = X.size();
    const std::size_t k = std::min(cfg.k_rank, n - 1);
    const std::size_t kc = std::min(cfg.k_class, n - 1);

    // query indices: a seeded sample without replacement, ascending
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(cfg.seed ^ 0xb5ad4eceda1ce2a9ull);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(cfg.queries, n));
    std::sort(pool.begin(), pool.end());

    // brute oracle per query, self excluded
    std::vector<std::vector<std::size_t>> oracle(pool.size());
    for (std::size_t qi = 0; qi < pool.size(); ++qi) {
        std::vector<Neighbor> full = brute_nn(cfg.metric, X[pool[qi]], X, k + 1);
        for (const Neighbor& nb : full) {
            if (nb.index == pool[qi]) continue;
            oracle[qi].push_back(nb.index);
            if (oracle[qi].size() == k) break;
        }
    }

    for (SplitKind kind : cfg.tree_kinds)
        for (double spill : cfg.spills)
            for (std::size_t leaf : cfg.leaf_sizes) {
                auto t0 = std::chrono::steady_clock::now();
                TreeConfig tc;
                tc.split.kind = kind;
                tc.spill_fraction = spill;
                tc.max_leaf_size = leaf;
                tc.rng_seed = cfg.seed;
                SpatialTree tree = build_tree(X, cfg.metric, tc);

                ResultRow row;
                row.tree = split_kind_name(kind);
                row.spill = spill;
                row.leaf_size = leaf;
                std::size_t comparisons = 0;
                double ratio_sum = 0, hit_sum = 0;
                std::size_t misclassified = 0;
                for (std::size_t qi = 0; qi < pool.size(); ++qi) {
                    std::size_t self = pool[qi];
                    std::vector<std::size_t> got =
                        query_without_self(tree, self, k, comparisons);
                    ratio_sum += got.empty() ? 0.0
                                             : rank_ratio(cfg.metric, X[self], X, got, self);
                    std::set<std::size_t> truth(oracle[qi].begin(), oracle[qi].end());
                    std::size_t hits = 0;
                    for (std::size_t idx : got) hits += truth.count(idx);
                    hit_sum += static_cast<double>(hits) / static_cast<double>(k);
                    if (X.labels) {
                        std::size_t c_ignored = 0;
                        std::vector<std::size_t> voters =
                            query_without_self(tree, self, kc, c_ignored);
                        std::map<int, std::size_t> votes;
                        for (std::size_t idx : voters) ++votes[(*X.labels)[idx]];
                        int best_label = 0;
                        std::size_t best_count = 0;
                        for (const auto& [label, count] : votes)
                            if (count > best_count) {
                                best_count = count;
                                best_label = label;
                            }
                        if (voters.empty() || best_label != (*X.labels)[self])
                            ++misclassified;
                    }
                }
                const double nq = static_cast<double>(pool.size());
                row.mean_comparisons = static_cast<double>(comparisons) / nq;
                row.mean_rank_ratio = ratio_sum / nq;
                row.recall_at_k = hit_sum / nq;
                if (X.labels)
                    row.classification_error = static_cast<double>(misclassified) / nq;
                row.wall_time =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                res.rows.push_back(std::move(row));
            }

    std::ostringstream csv;
    csv << "# benchfmt/1\n";
    csv << "# spill_interpretation=fraction\n";
    csv << "tree,spill,leaf_size,mean_comparisons,mean_rank_ratio,recall_at_k,"
           "classification_error\n";
    for (const ResultRow& row : res.rows) {
        csv << row.tree << ',' << format_real(row.spill) << ',' << row.leaf_size << ','
            << format_real(row.mean_comparisons) << ',' << format_real(row.mean_rank_ratio)
            << ',' << format_real(row.recall_at_k) << ',';
        if (row.classification_error) csv << format_real(*row.classification_error);
        csv << '\n';
    }
    res.csv = csv.str();

    nlohmann::ordered_json j;
    j["format"] = "benchfmt/1";
    j["spill_interpretation"] = "fraction";
    j["config"] = config_json(cfg);
    if (cfg.jl_dim > 0) j["jl_distortion"] = res.jl_distortion;
    if (cfg.lsh) {
        // optional side experiment: query the pool against an LSH index
        LshIndex index = lsh_build(X, *cfg.lsh);
        std::size_t hits = 0, lsh_comparisons = 0;
        for (std::size_t self : pool) {
            LshAnswer ans = lsh_query(index, X[self]);
            lsh_comparisons += ans.comparisons;
            if (ans.hit) ++hits;
        }
        nlohmann::ordered_json l;
        l["hit_rate"] = static_cast<double>(hits) / static_cast<double>(pool.size());
        l["mean_comparisons"] =
            static_cast<double>(lsh_comparisons) / static_cast<double>(pool.size());
        j["lsh"] = std::move(l);
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ResultRow& row : res.rows) {
        nlohmann::ordered_json r;
        r["tree"] = row.tree;
        r["spill"] = row.spill;
        r["leaf_size"] = row.leaf_size;
        r["mean_comparisons"] = row.mean_comparisons;
        r["mean_rank_ratio"] = row.mean_rank_ratio;
        r["recall_at_k"] = row.recall_at_k;
        if (row.classification_error)
            r["classification_error"] = *row.classification_error;
        else
            r["classification_error"] = nullptr;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    res.json = j.dump(2) + "\n";

    if (write_files) {
        std::ofstream fcsv(cfg.out + ".csv", std::ios::binary);
        std::ofstream fjson(cfg.out + ".json", std::ios::binary);
        if (!fcsv || !fjson)
            throw std::runtime_error("cannot write output '" + cfg.out + "'");
        fcsv << res.csv;
        fjson << res.json;
    }
    return res;
}

}  // namespace proxkit
