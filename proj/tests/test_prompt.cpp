#include <doctest.h>

#include <cmath>

#include "gplab/prompt.hpp"

using namespace gplab;

namespace {

Graph small_graph(RngStream& rng) { return generate_graph(6, 4, 0.4, rng); }

} // namespace

TEST_CASE("gpf shifts every node feature by the same vector") {
    RngStream rng(21, 0);
    Graph g = small_graph(rng);
    Prompt p = init_prompt(PromptKind::Gpf, 1, 4, 1, {}, rng);
    p.p = {1.0, -2.0, 0.5, 0.0};
    PromptedGraph pg = apply_prompt(p, g);
    CHECK(pg.n_prompt_nodes == 0);
    for (std::size_t i = 0; i < g.n_nodes; ++i)
        for (std::size_t f = 0; f < 4; ++f)
            CHECK(pg.graph.features(i, f) == doctest::Approx(g.features(i, f) + p.p[f]));
    CHECK((pg.graph.adjacency - g.adjacency).frobenius_norm() == 0.0);
    CHECK_THROWS(init_prompt(PromptKind::Gpf, 2, 4, 1, {}, rng)); // gpf is single-token
}

TEST_CASE("gpf_plus applies the per-graph token combination") {
    RngStream rng(22, 0);
    Graph g = small_graph(rng);
    Prompt p = init_prompt(PromptKind::GpfPlus, 2, 4, 3, {}, rng);
    // graph 1 uses 2 * token0 - 1 * token1
    p.q(1, 0) = 2.0;
    p.q(1, 1) = -1.0;
    PromptedGraph pg = apply_prompt(p, g, 1);
    for (std::size_t f = 0; f < 4; ++f) {
        double shift = 2.0 * p.tokens(0, f) - 1.0 * p.tokens(1, f);
        CHECK(pg.graph.features(0, f) == doctest::Approx(g.features(0, f) + shift));
    }
    CHECK_THROWS(apply_prompt(p, g, 3)); // beyond Q rows
}

TEST_CASE("all_in_one attaches token nodes with softplus cross links") {
    RngStream rng(23, 0);
    Graph g = small_graph(rng);
    Prompt p = init_prompt(PromptKind::AllInOne, 3, 4, 1, {g.n_nodes}, rng);
    CHECK(p.inner_mode == InnerMode::InnerProductSigmoid); // k > 1 default
    PromptedGraph pg = apply_prompt(p, g, 0);
    CHECK(pg.graph.n_nodes == g.n_nodes + 3);
    CHECK(pg.n_prompt_nodes == 3);
    pg.graph.validate();
    const std::size_t n = g.n_nodes;
    // original block untouched
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            CHECK(pg.graph.adjacency(i, j) == doctest::Approx(g.adjacency(i, j)));
    // cross links: softplus of the raw parameters, symmetric
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(pg.graph.adjacency(n + a, i) ==
                  doctest::Approx(softplus(p.cross_raw[0](a, i))));
            CHECK(pg.graph.adjacency(i, n + a) == pg.graph.adjacency(n + a, i));
        }
    // inner links: sigmoid of token dot products, zero diagonal
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(pg.graph.adjacency(n + a, n + a) == 0.0);
        for (std::size_t b = a + 1; b < 3; ++b) {
            double dot = 0.0;
            for (std::size_t f = 0; f < 4; ++f) dot += p.tokens(a, f) * p.tokens(b, f);
            CHECK(pg.graph.adjacency(n + a, n + b) == doctest::Approx(sigmoid(dot)));
        }
    }
    // token rows carry the token features
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t f = 0; f < 4; ++f)
            CHECK(pg.graph.features(n + a, f) == doctest::Approx(p.tokens(a, f)));
}

TEST_CASE("all_in_one zero inner mode leaves tokens unlinked") {
    RngStream rng(24, 0);
    Graph g = small_graph(rng);
    Prompt p = init_prompt(PromptKind::AllInOne, 2, 4, 1, {g.n_nodes}, rng, InnerMode::Zero, true);
    PromptedGraph pg = apply_prompt(p, g, 0);
    const std::size_t n = g.n_nodes;
    CHECK(pg.graph.adjacency(n, n + 1) == 0.0);
    CHECK(pg.graph.adjacency(n + 1, n) == 0.0);
}

TEST_CASE("parameter vector round-trip") {
    RngStream rng(25, 0);
    for (auto kind : {PromptKind::Gpf, PromptKind::GpfPlus, PromptKind::AllInOne}) {
        std::size_t k = kind == PromptKind::Gpf ? 1 : 3;
        Prompt p = init_prompt(kind, k, 5, 2, {4, 7}, rng);
        std::vector<double> v = p.to_vector();
        CHECK(v.size() == p.param_count());
        for (double& x : v) x += 1.0;
        p.from_vector(v);
        CHECK(p.to_vector() == v);
        v.pop_back();
        CHECK_THROWS(p.from_vector(v));
    }
}

TEST_CASE("softplus and sigmoid are stable at extremes") {
    CHECK(softplus(100.0) == doctest::Approx(100.0));
    CHECK(softplus(-100.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
    CHECK(sigmoid(100.0) == doctest::Approx(1.0));
    CHECK(sigmoid(-100.0) == doctest::Approx(0.0).epsilon(1e-12));
}
