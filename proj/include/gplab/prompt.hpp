#pragma once

#include <vector>

#include "gplab/graph.hpp"

namespace gplab {

enum class PromptKind { Gpf, GpfPlus, AllInOne };

enum class InnerMode { Zero, InnerProductSigmoid };

/// The one trainable object. A single struct covers the three
/// parameterizations; unused fields stay empty.
struct Prompt {
    PromptKind kind = PromptKind::Gpf;
    std::size_t k = 1;            // token count
    std::size_t feature_dim = 0;  // F
    std::size_t n_graphs = 1;     // M (batch size the prompt addresses)

    std::vector<double> p;          // gpf: length F
    Matrix tokens;                  // gpf_plus / all_in_one: k x F
    Matrix q;                       // gpf_plus: M x k combination coefficients
    std::vector<Matrix> cross_raw;  // all_in_one: per graph k x N_i, unconstrained
    InnerMode inner_mode = InnerMode::Zero;

    std::size_t param_count() const;
    std::vector<double> to_vector() const;
    void from_vector(const std::vector<double>& v);
};

struct PromptedGraph {
    Graph graph;
    std::size_t n_prompt_nodes = 0; // trailing rows of the node set
};

/// Near-zero Gaussian initialization (scale 0.01) for every parameter.
/// node_counts supplies N_i for the all_in_one cross blocks.
Prompt init_prompt(PromptKind kind, std::size_t k, std::size_t feature_dim, std::size_t n_graphs,
                   const std::vector<std::size_t>& node_counts, RngStream& rng,
                   InnerMode inner_mode_override = InnerMode::Zero,
                   bool use_inner_override = false);

/// P_omega(G). Never mutates g.
PromptedGraph apply_prompt(const Prompt& prompt, const Graph& g, std::size_t graph_index = 0);

double softplus(double x);
double sigmoid(double x);

std::string to_string(PromptKind k);
PromptKind prompt_kind_from_string(const std::string& s);

} // namespace gplab
