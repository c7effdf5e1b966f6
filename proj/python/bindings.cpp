#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "proxkit/bench.hpp"
#include "proxkit/chromatic.hpp"
#include "proxkit/difficulty.hpp"
#include "proxkit/dual.hpp"
#include "proxkit/geo.hpp"
#include "proxkit/lsh.hpp"
#include "proxkit/tree.hpp"

namespace py = pybind11;
using namespace proxkit;

namespace {

PointSet make_points(const std::vector<std::vector<double>>& rows,
                     const std::optional<std::vector<int>>& labels,
                     const std::optional<std::vector<int>>& colors) {
    PointSet X;
    for (const auto& row : rows) X.push_back(row);
    if (labels) {
        if (labels->size() != X.size())
            throw std::invalid_argument("labels length must match point count");
        X.labels = labels;
    }
    if (colors) {
        if (colors->size() != X.size())
            throw std::invalid_argument("colors length must match point count");
        X.colors = colors;
    }
    return X;
}

TreeConfig make_tree_config(const std::string& split, double spill, std::size_t leaf_size,
                            std::uint64_t seed, bool query_both_sides) {
    TreeConfig cfg;
    cfg.split.kind = parse_split_kind(split);
    cfg.spill_fraction = spill;
    cfg.max_leaf_size = leaf_size;
    cfg.rng_seed = seed;
    cfg.spill_mode = query_both_sides ? SpillMode::QueryBothSides
                                      : SpillMode::BuildDuplication;
    return cfg;
}

py::list neighbors_to_list(const std::vector<Neighbor>& nbs) {
    py::list out;
    for (const Neighbor& nb : nbs) out.append(py::make_tuple(nb.index, nb.dist));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "geometric proximity toolkit";

    py::class_<Metric>(m, "Metric")
        .def_static("parse", &parse_metric, py::arg("name"))
        .def_property_readonly("name", &Metric::name)
        .def("is_true_metric", &Metric::is_true_metric);

    m.def(
        "distance",
        [](const std::string& metric, const std::vector<double>& a,
           const std::vector<double>& b) { return distance(parse_metric(metric), a, b); },
        py::arg("metric"), py::arg("a"), py::arg("b"));

    m.def(
        "brute_nn",
        [](const std::string& metric, const std::vector<double>& q,
           const std::vector<std::vector<double>>& points, std::size_t k) {
            return neighbors_to_list(
                brute_nn(parse_metric(metric), q, make_points(points, {}, {}), k));
        },
        py::arg("metric"), py::arg("q"), py::arg("points"), py::arg("k"));

    py::class_<SpatialTree>(m, "SpatialTree")
        .def_property_readonly("size", [](const SpatialTree& t) { return t.points.size(); })
        .def_property_readonly("depth", &SpatialTree::depth)
        .def("to_json", [](const SpatialTree& t) { return tree_to_json(t); })
        .def_static("from_json", [](const std::string& s) { return tree_from_json(s); });

    m.def(
        "build_tree",
        [](const std::vector<std::vector<double>>& points, const std::string& metric,
           const std::string& split, double spill, std::size_t leaf_size,
           std::uint64_t seed, bool query_both_sides) {
            return build_tree(make_points(points, {}, {}), parse_metric(metric),
                              make_tree_config(split, spill, leaf_size, seed,
                                               query_both_sides));
        },
        py::arg("points"), py::arg("metric") = "euclidean", py::arg("split") = "kd",
        py::arg("spill") = 0.0, py::arg("leaf_size") = 8, py::arg("seed") = 0,
        py::arg("query_both_sides") = false);

    m.def(
        "defeatist_nns",
        [](const SpatialTree& tree, const std::vector<double>& q, std::size_t k) {
            SearchReport rep = defeatist_nns(tree, q, k);
            return py::make_tuple(neighbors_to_list(rep.result), rep.comparisons);
        },
        py::arg("tree"), py::arg("q"), py::arg("k") = 1);

    m.def(
        "comprehensive_nns",
        [](const SpatialTree& tree, const std::vector<double>& q, std::size_t k) {
            SearchReport rep = comprehensive_nns(tree, q, k);
            return py::make_tuple(neighbors_to_list(rep.result), rep.comparisons);
        },
        py::arg("tree"), py::arg("q"), py::arg("k") = 1);

    m.def(
        "cnns",
        [](const std::vector<std::vector<double>>& points, const std::vector<int>& colors,
           const std::vector<double>& q, int q_color, const std::string& metric,
           bool exact) {
            PointSet X = make_points(points, {}, colors);
            SpatialTree tree = build_tree(X, parse_metric(metric), TreeConfig{});
            ChromaticIndex index = make_chromatic(std::move(tree), colors);
            SearchReport rep = cnns(index, q, q_color, 1, exact);
            return py::make_tuple(rep.result.at(0).index, rep.result.at(0).dist);
        },
        py::arg("points"), py::arg("colors"), py::arg("q"), py::arg("q_color"),
        py::arg("metric") = "euclidean", py::arg("exact") = true);

    m.def(
        "emst",
        [](const std::vector<std::vector<double>>& points, const std::string& metric) {
            EmstResult res = emst_boruvka(make_points(points, {}, {}), parse_metric(metric),
                                          TreeConfig{});
            py::list edges;
            for (const EmstEdge& e : res.edges)
                edges.append(py::make_tuple(e.u, e.v, e.weight));
            return py::make_tuple(edges, res.total_weight);
        },
        py::arg("points"), py::arg("metric") = "euclidean");

    m.def(
        "farthest_first",
        [](const std::vector<std::vector<double>>& points, std::size_t k,
           const std::string& metric) {
            KCenterResult res =
                farthest_first(make_points(points, {}, {}), parse_metric(metric), k);
            return py::make_tuple(res.centers, res.cost);
        },
        py::arg("points"), py::arg("k"), py::arg("metric") = "euclidean");

    m.def(
        "greedy_tsp",
        [](const std::vector<std::vector<double>>& points, const std::string& metric) {
            TspResult res = greedy_tsp(make_points(points, {}, {}), parse_metric(metric));
            return py::make_tuple(res.tour, res.length);
        },
        py::arg("points"), py::arg("metric") = "euclidean");

    m.def(
        "knn_classify",
        [](const std::vector<std::vector<double>>& points, const std::vector<int>& labels,
           const std::vector<double>& q, std::size_t k, const std::string& metric) {
            return knn_classify(make_points(points, labels, {}), parse_metric(metric), q, k);
        },
        py::arg("points"), py::arg("labels"), py::arg("q"), py::arg("k") = 1,
        py::arg("metric") = "euclidean");

    m.def(
        "phi",
        [](const std::vector<double>& q, const std::vector<std::vector<double>>& points,
           const std::string& metric, std::size_t k, std::size_t m) {
            PhiVariant variant = (k == 1 && m == 0) ? PhiVariant::PhiN : PhiVariant::PhiKM;
            return proxkit::phi(q, make_points(points, {}, {}), parse_metric(metric),
                                variant, k, m)
                .phi;
        },
        py::arg("q"), py::arg("points"), py::arg("metric") = "euclidean", py::arg("k") = 1,
        py::arg("m") = 0);

    m.def(
        "lsh_query",
        [](const std::vector<std::vector<double>>& points, const std::vector<double>& q,
           double radius, double approximation, std::size_t tables, std::size_t hashes,
           double bucket_width, std::uint64_t seed) {
            LshParams params;
            params.near_radius = radius;
            params.approximation = approximation;
            params.tables = tables;
            params.hashes_per_table = hashes;
            params.bucket_width = bucket_width;
            params.seed = seed;
            LshIndex index = lsh_build(make_points(points, {}, {}), params);
            LshAnswer ans = lsh_query(index, q);
            if (!ans.hit) return py::object(py::none());
            return py::object(py::make_tuple(ans.hit->index, ans.hit->dist));
        },
        py::arg("points"), py::arg("q"), py::arg("radius") = 1.0,
        py::arg("approximation") = 2.0, py::arg("tables") = 8, py::arg("hashes") = 4,
        py::arg("bucket_width") = 1.0, py::arg("seed") = 0);

    m.def(
        "generate",
        [](const std::string& name, std::size_t n, std::size_t dim, std::uint64_t seed) {
            PointSet X = generate(name, n, dim, seed);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < X.size(); ++i) rows.push_back(X.point(i));
            return rows;
        },
        py::arg("name"), py::arg("n") = 100, py::arg("dim") = 2, py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::string& config_text) {
            ExperimentConfig cfg = parse_config(config_text);
            ExperimentResult res = run_experiment(cfg, false);
            return py::make_tuple(res.csv, res.json);
        },
        py::arg("config_text"));
}
