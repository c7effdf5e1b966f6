#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "proxkit/bench.hpp"
#include "proxkit/difficulty.hpp"
#include "proxkit/geo.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

proxkit::Metric metric_flag(const std::string& text) {
    return proxkit::parse_metric(text);
}

void print_real(const char* label, double v) {
    std::printf("%s %.12g\n", label, v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proximity benchmark harness"};
    app.require_subcommand(1);

    std::string metric_text = "euclidean";
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--metric", metric_text, "euclidean | minkowski:p | kl");
    app.add_option("--seed", seed, "rng seed");
    app.add_option("--out", out, "output path");

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config_path;
    run->add_option("config", config_path, "flat key=value config file")->required();

    auto* gen = app.add_subcommand("gen", "generate a dataset CSV");
    std::string gen_name;
    std::size_t gen_n = 100, gen_dim = 2;
    double gen_m = 100.0;
    gen->add_option("name", gen_name, "uniform | two_lines | kd_adversarial")->required();
    gen->add_option("--n", gen_n, "point count");
    gen->add_option("--dim", gen_dim, "dimension");
    gen->add_option("--m", gen_m, "kd_adversarial large constant");

    std::string data_path;
    auto* emst = app.add_subcommand("emst", "Euclidean minimum spanning tree");
    emst->add_option("file", data_path, "points CSV")->required();

    auto* kcenters = app.add_subcommand("kcenters", "farthest-first k centers");
    std::size_t k_centers = 2;
    kcenters->add_option("file", data_path, "points CSV")->required();
    kcenters->add_option("--k", k_centers, "number of centers")->required();

    auto* tsp = app.add_subcommand("tsp", "greedy nearest-neighbor tour");
    tsp->add_option("file", data_path, "points CSV")->required();

    auto* phi_cmd = app.add_subcommand("phi", "difficulty potential of queries");
    std::string queries_path, refs_path;
    phi_cmd->add_option("queries", queries_path, "query CSV")->required();
    phi_cmd->add_option("refs", refs_path, "reference CSV")->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        proxkit::Metric metric = metric_flag(metric_text);

        if (*run) {
            proxkit::ExperimentConfig cfg = proxkit::load_config(config_path);
            if (!out.empty()) cfg.out = out;
            proxkit::ExperimentResult res = proxkit::run_experiment(cfg);
            std::printf("rows %zu\n", res.rows.size());
            for (const proxkit::ResultRow& row : res.rows)
                std::printf("%s spill=%g leaf=%zu wall_time=%.6f\n", row.tree.c_str(),
                            row.spill, row.leaf_size, row.wall_time);
            std::printf("wrote %s.csv and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
            return 0;
        }

        if (*gen) {
            proxkit::PointSet X = proxkit::generate(gen_name, gen_n, gen_dim, seed, gen_m);
            if (out.empty()) out = gen_name + ".csv";
            proxkit::write_csv(X, out);
            std::printf("wrote %zu points to %s\n", X.size(), out.c_str());
            return 0;
        }

        if (*emst) {
            proxkit::PointSet X = proxkit::ingest_csv(data_path, false);
            proxkit::TreeConfig tc;
            tc.rng_seed = seed;
            proxkit::EmstResult res = proxkit::emst_boruvka(X, metric, tc);
            print_real("total_weight", res.total_weight);
            std::printf("rounds %zu cnns_queries %zu recolor_events %zu\n", res.rounds,
                        res.cnns_queries, res.recolor_events);
            for (const proxkit::EmstEdge& e : res.edges)
                std::printf("%zu %zu %.12g\n", e.u, e.v, e.weight);
            return 0;
        }

        if (*kcenters) {
            proxkit::PointSet X = proxkit::ingest_csv(data_path, false);
            proxkit::KCenterResult res = proxkit::farthest_first(X, metric, k_centers);
            print_real("cost", res.cost);
            for (std::size_t c : res.centers) std::printf("%zu\n", c);
            return 0;
        }

        if (*tsp) {
            proxkit::PointSet X = proxkit::ingest_csv(data_path, false);
            proxkit::TspResult res = proxkit::greedy_tsp(X, metric);
            print_real("length", res.length);
            for (std::size_t i : res.tour) std::printf("%zu\n", i);
            return 0;
        }

        if (*phi_cmd) {
            proxkit::PointSet Q = proxkit::ingest_csv(queries_path, false);
            proxkit::PointSet X = proxkit::ingest_csv(refs_path, false);
            for (std::size_t i = 0; i < Q.size(); ++i) {
                proxkit::PotentialReport rep = proxkit::phi(Q[i], X, metric);
                std::printf("query %zu phi %.12g\n", i, rep.phi);
            }
            proxkit::BatchPotentialReport batch =
                proxkit::batch_phi(Q, X, metric, 1, X.size());
            print_real("phi1", batch.phi1);
            print_real("phi2", batch.phi2);
            print_real("product", batch.product);
            return 0;
        }
    } catch (const proxkit::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const proxkit::CsvError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    }
    return 0;
}
