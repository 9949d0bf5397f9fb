#include <doctest.h>

#include <cmath>

#include "gplab/graph.hpp"

using namespace gplab;

TEST_CASE("generate_graph produces valid graphs with roughly the right density") {
    RngStream rng(1, 0);
    Graph g = generate_graph(50, 8, 0.2, rng);
    g.validate();
    CHECK(g.n_nodes == 50);
    CHECK(g.feature_dim() == 8);
    double max_edges = 50.0 * 49.0 / 2.0;
    double density = static_cast<double>(g.edge_count()) / max_edges;
    CHECK(density > 0.1);
    CHECK(density < 0.3);
    CHECK_THROWS(generate_graph(0, 4, 0.1, rng));
    CHECK_THROWS(generate_graph(5, 4, 1.5, rng));
}

TEST_CASE("generate_dataset keeps node counts inside the half-width band") {
    RngStream rng(2, 0);
    DatasetSpec spec;
    spec.n_graphs = 40;
    spec.avg_nodes = 20;
    spec.feature_dim = 4;
    auto graphs = generate_dataset(spec, rng);
    REQUIRE(graphs.size() == 40);
    for (const auto& g : graphs) {
        CHECK(g.n_nodes >= 10);
        CHECK(g.n_nodes <= 30);
    }
}

TEST_CASE("data operations: identity at zero intensity, full effect at one") {
    RngStream rng(3, 0);
    Graph g = generate_graph(12, 5, 0.3, rng);

    DataOperationSpec zero;
    zero.intensity = 0.0;
    Graph same = apply_data_operation(g, zero, rng);
    CHECK(same.n_nodes == g.n_nodes);
    CHECK((same.adjacency - g.adjacency).frobenius_norm() == 0.0);
    CHECK((same.features - g.features).frobenius_norm() == 0.0);

    DataOperationSpec mask_all;
    mask_all.intensity = 1.0;
    mask_all.enabled_ops = {DataOp::MaskFeature};
    Graph masked = apply_data_operation(g, mask_all, rng);
    CHECK(masked.features.frobenius_norm() == 0.0);

    DataOperationSpec drop_all;
    drop_all.intensity = 1.0;
    drop_all.enabled_ops = {DataOp::DeleteNode};
    Graph dropped = apply_data_operation(g, drop_all, rng);
    CHECK(dropped.n_nodes == 1); // never empties the graph

    DataOperationSpec moderate; // all ops, default beta
    Graph t = apply_data_operation(g, moderate, rng);
    t.validate();
}

TEST_CASE("diffusion matrices") {
    RngStream rng(4, 0);
    Graph g = generate_graph(6, 3, 0.4, rng);
    Matrix raw = diffusion_matrix(g, DiffusionScheme::RawSelfLoop);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(raw(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 6; ++j)
            if (i != j) CHECK(raw(i, j) == doctest::Approx(g.adjacency(i, j)));
    }
    Matrix sym = diffusion_matrix(g, DiffusionScheme::SymNormalized);
    CHECK(sym.is_symmetric(1e-12));
    // spot-check the normalization on one entry
    std::vector<double> deg(6, 0.0);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) deg[i] += raw(i, j);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(sym(i, j) == doctest::Approx(raw(i, j) / std::sqrt(deg[i] * deg[j])));
}

TEST_CASE("tu reader parses the toy fixture exactly") {
    auto graphs = read_tu_dataset(GPLAB_TEST_DATA_DIR, "TOY");
    REQUIRE(graphs.size() == 3);
    CHECK(graphs[0].n_nodes == 3);
    CHECK(graphs[1].n_nodes == 4);
    CHECK(graphs[2].n_nodes == 2);
    CHECK(graphs[0].edge_count() == 3); // triangle
    CHECK(graphs[1].edge_count() == 3); // path
    CHECK(graphs[2].edge_count() == 1);
    for (const auto& g : graphs) {
        g.validate();
        CHECK(g.feature_dim() == 3); // three distinct labels, one-hot
        for (std::size_t i = 0; i < g.n_nodes; ++i) {
            double row = 0.0;
            for (std::size_t f = 0; f < 3; ++f) row += g.features(i, f);
            CHECK(row == doctest::Approx(1.0));
        }
    }
    // node 1 has label 0, node 5 (graph 2, local 1) has label 2
    CHECK(graphs[0].features(0, 0) == doctest::Approx(1.0));
    CHECK(graphs[1].features(1, 2) == doctest::Approx(1.0));
    CHECK_THROWS(read_tu_dataset(GPLAB_TEST_DATA_DIR, "MISSING"));
}

TEST_CASE("string round-trips") {
    for (auto s : {"raw_self_loop", "sym_normalized"})
        CHECK(to_string(diffusion_scheme_from_string(s)) == s);
    for (auto s : {"delete_node", "add_node", "delete_edge", "add_edge", "mask_feature"})
        CHECK(to_string(data_op_from_string(s)) == s);
    CHECK_THROWS(diffusion_scheme_from_string("bogus"));
}
