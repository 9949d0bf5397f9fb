#pragma once

#include <set>
#include <string>
#include <vector>

#include "gplab/matrix.hpp"
#include "gplab/rng.hpp"

namespace gplab {

/// Undirected graph: nonnegative symmetric adjacency with zero diagonal plus
/// an n x F node-feature matrix.
struct Graph {
    std::size_t n_nodes = 0;
    Matrix adjacency; // n x n
    Matrix features;  // n x F

    std::size_t feature_dim() const { return features.cols(); }
    std::size_t edge_count() const;
    void validate() const;
};

enum class DataOp { DeleteNode, AddNode, DeleteEdge, AddEdge, MaskFeature };

struct DataOperationSpec {
    double intensity = 0.7; // beta
    std::set<DataOp> enabled_ops{DataOp::DeleteNode, DataOp::AddNode, DataOp::DeleteEdge,
                                 DataOp::AddEdge, DataOp::MaskFeature};
    double add_edge_density = 0.15; // wiring probability for inserted nodes
};

struct DatasetSpec {
    std::size_t n_graphs = 1;     // M
    std::size_t feature_dim = 25; // F
    std::size_t avg_nodes = 20;   // N_avg
    double density = 0.15;        // rho
};

enum class DiffusionScheme { RawSelfLoop, SymNormalized };

/// Erdos-Renyi graph with i.i.d. standard-normal features.
Graph generate_graph(std::size_t n_nodes, std::size_t feature_dim, double density, RngStream& rng);

/// M graphs with node counts uniform in [ceil(0.5 N_avg), floor(1.5 N_avg)].
std::vector<Graph> generate_dataset(const DatasetSpec& spec, RngStream& rng);

/// Applies each enabled operation to each candidate element independently with
/// probability beta. beta = 0 is the identity; beta = 1 transforms every
/// candidate. The result always keeps at least one node.
Graph apply_data_operation(const Graph& g, const DataOperationSpec& spec, RngStream& rng);

/// RawSelfLoop: A + I. SymNormalized: D^{-1/2} (A + I) D^{-1/2}.
Matrix diffusion_matrix(const Graph& g, DiffusionScheme scheme);
Matrix diffusion_from_adjacency(const Matrix& adjacency, DiffusionScheme scheme);

/// TU plain-text dataset reader: <name>_A.txt (1-indexed "i, j" pairs),
/// <name>_graph_indicator.txt, and <name>_node_labels.txt (one-hot encoded)
/// or <name>_node_attributes.txt.
std::vector<Graph> read_tu_dataset(const std::string& path, const std::string& name);

std::string to_string(DiffusionScheme s);
DiffusionScheme diffusion_scheme_from_string(const std::string& s);
std::string to_string(DataOp op);
DataOp data_op_from_string(const std::string& s);

} // namespace gplab
