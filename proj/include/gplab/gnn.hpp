#pragma once

#include <string>
#include <vector>

#include "gplab/graph.hpp"

namespace gplab {

enum class Arch { Gcn, Gat, GcnLinear };

enum class ReadoutKind { Mean, Sum, Weighted };

struct Readout {
    ReadoutKind kind = ReadoutKind::Mean;
    std::vector<double> weights; // Weighted only; strictly positive
};

/// Frozen message-passing model: per-layer F x F weights, Leaky-ReLU slope,
/// readout scheme, diffusion scheme. Immutable after construction.
struct FrozenModel {
    Arch arch = Arch::Gcn;
    std::vector<Matrix> layers;
    double leaky_slope = 0.2;
    Readout readout;
    DiffusionScheme scheme = DiffusionScheme::RawSelfLoop;
    std::size_t rank_loss = 0;    // singular values zeroed per deficient layer
    bool deficient_all_layers = false;

    std::size_t n_layers() const { return layers.size(); }
    std::size_t feature_dim() const { return layers.empty() ? 0 : layers[0].rows(); }
};

/// Weights drawn i.i.d. Gaussian with scale 1/sqrt(F); rank_loss enforced on
/// the last layer (or all layers) by SVD truncation.
FrozenModel init_frozen_model(std::size_t n_layers, std::size_t feature_dim, Arch arch,
                              std::size_t rank_loss, double leaky_slope, Readout readout,
                              DiffusionScheme scheme, RngStream& rng,
                              bool deficient_all_layers = false);

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
    Matrix s;                // aggregation matrix (diffusion or attention)
    std::vector<Matrix> h;   // h[0] = features, h[l+1] = act(z[l]); size n+1
    std::vector<Matrix> z;   // pre-activations, size n
    std::vector<Matrix> y;   // y[l] = h[l] * W[l], size n
    std::vector<double> output;
};

/// Forward pass over an explicit (adjacency, features) pair; used for both
/// plain and prompted graphs.
ForwardCache forward_pass(const FrozenModel& model, const Matrix& adjacency,
                          const Matrix& features);

/// Node-embedding matrix H^(n).
Matrix forward_embedding(const FrozenModel& model, const Graph& g);

/// Graph-level embedding after readout.
std::vector<double> model_output(const FrozenModel& model, const Graph& g);

/// C(G) := model_output(model, apply_data_operation(g, spec)); constructing
/// targets this way guarantees they sit in the model's reachable set.
std::vector<double> target_embedding(const FrozenModel& model, const Graph& g,
                                     const DataOperationSpec& spec, RngStream& rng);

std::vector<double> apply_readout(const Readout& readout, const Matrix& h);

/// Attention matrix for GAT: e_ij = x_i . x_j over N(i) u {i}, row-softmaxed.
Matrix gat_attention(const Matrix& adjacency, const Matrix& features);

double activation(double x, double slope, bool linear);
double activation_grad(double x, double slope, bool linear);

std::string save_model_json(const FrozenModel& model);
FrozenModel load_model_json(const std::string& text);
void save_model_file(const FrozenModel& model, const std::string& path);
FrozenModel load_model_file(const std::string& path);

std::string to_string(Arch a);
Arch arch_from_string(const std::string& s);
std::string to_string(ReadoutKind k);
ReadoutKind readout_kind_from_string(const std::string& s);

} // namespace gplab
