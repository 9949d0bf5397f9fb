#pragma once

#include <string>
#include <vector>

#include "gplab/gnn.hpp"
#include "gplab/prompt.hpp"

namespace gplab {

struct Hyperparams {
    double learning_rate = 1e-4;
    double weight_decay = 5e-5;
    std::size_t max_epochs = 2000;
    std::size_t restarts = 3;
    double stop_tol = 1e-8;
    std::size_t patience = 100;
    double improvement_tol = 1e-7;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    std::string config;              // snapshot, serialized
    std::vector<double> loss_trace;  // per-epoch loss (epsilon or batch RMSE)
    double final_epsilon = 0.0;      // best-ever loss
    std::size_t epochs_run = 0;
    bool diverged = false;
    Prompt best_prompt;

    std::string to_json() const;
};

/// || model_output(pg) - target ||.
double epsilon_loss(const FrozenModel& model, const PromptedGraph& pg,
                    const std::vector<double>& target);

/// sqrt(sum_i epsilon_i^2 / M).
double batch_rmse_loss(const FrozenModel& model, const std::vector<PromptedGraph>& pgs,
                       const std::vector<std::vector<double>>& targets);

/// Batch RMSE after applying `prompt` to each graph.
double prompt_loss(const FrozenModel& model, const Prompt& prompt,
                   const std::vector<Graph>& graphs,
                   const std::vector<std::vector<double>>& targets);

/// Exact reverse-mode gradient of the squared loss (single graph) or
/// squared-mean loss (batch) with respect to every prompt parameter, in
/// Prompt::to_vector order. Propagates through readout, Leaky-ReLU, the
/// S*H*W chain, softplus cross links, sigmoid inner links, and for GAT the
/// softmax-attention Jacobian.
std::vector<double> prompt_gradient(const FrozenModel& model, const Prompt& prompt,
                                    const std::vector<Graph>& graphs,
                                    const std::vector<std::vector<double>>& targets);

/// Central finite differences on the same loss; the test oracle.
std::vector<double> finite_diff_gradient(const FrozenModel& model, const Prompt& prompt,
                                         const std::vector<Graph>& graphs,
                                         const std::vector<std::vector<double>>& targets,
                                         double step);

/// Adam with decoupled weight decay on the prompt parameters; returns the
/// best-iterate prompt and its loss.
TrialRecord train_prompt(const FrozenModel& model, const std::vector<Graph>& graphs,
                         const std::vector<std::vector<double>>& targets, PromptKind kind,
                         std::size_t k, const Hyperparams& hp, RngStream& rng);

struct MultiRestartResult {
    TrialRecord best;
    std::vector<TrialRecord> all;
};

/// Independent restarts with derived seeds (root, restart_index); best by
/// final epsilon. Deterministic given the root stream.
MultiRestartResult multi_restart_train(const FrozenModel& model, const std::vector<Graph>& graphs,
                                       const std::vector<std::vector<double>>& targets,
                                       PromptKind kind, std::size_t k, const Hyperparams& hp,
                                       const RngStream& root);

struct LinearSolveResult {
    std::vector<double> p;
    double residual = 0.0;
};

/// Closed-form GPF solve for gcn_linear:
/// readout(S^n (X + 1 p^T) W1..Wn) = target.
LinearSolveResult linear_gpf_solve(const FrozenModel& model, const Graph& g,
                                   const std::vector<double>& target);

/// Closed-form best shared GPF vector for a batch of graphs under gcn_linear:
/// minimizes the squared loss summed over the batch; residual is the batch
/// RMSE obtained by plugging the solution back into the forward pass.
LinearSolveResult linear_gpf_batch_solve(const FrozenModel& model,
                                         const std::vector<Graph>& graphs,
                                         const std::vector<std::vector<double>>& targets);

} // namespace gplab
