#pragma once

#include <string>
#include <vector>

#include "gplab/optim.hpp"
#include "gplab/theory.hpp"

namespace gplab {

/// One entry in the experiment catalog plus every knob it needs. Defaults
/// come from defaults(name); JSON configs override field by field.
struct ExperimentConfig {
    std::string name; // see experiment_names()

    std::vector<std::string> prompt_kinds; // gpf | gpf_plus | all_in_one
    std::vector<std::string> archs;        // gcn | gat | gcn_linear

    std::size_t n_layers = 3;
    std::size_t feature_dim = 25;
    std::size_t avg_nodes = 20;
    double density = 0.15;
    std::size_t rank_loss = 0;
    bool deficient_all_layers = false;
    std::string scheme = "sym_normalized";
    double leaky_slope = 0.2;

    DataOperationSpec data_op;
    Hyperparams hp;

    std::vector<double> grid;        // meaning depends on the experiment
    std::vector<std::size_t> k_grid; // token counts (token_graph_surface)
    std::size_t n_models = 5;
    std::size_t n_repeats = 30;
    std::size_t batch_size = 1; // M when the experiment fixes it
    std::size_t k = 1;          // token count when the experiment fixes it
    std::uint64_t root_seed = 1;

    // data_op: run the data operation through the trial model itself.
    // gaussian: trial-model output plus isotropic noise.
    // full_rank_op: run the data operation through the full-rank sibling of the
    // trial model (same weight draw, no rank truncation), so rank-deficient
    // models chase a target their truncated weights can no longer express.
    std::string target_mode = "data_op"; // data_op | gaussian | full_rank_op
    double target_noise = 1.0;           // gaussian mode: C = F(G) + noise * N(0, I)
    bool closed_form = false;            // gpf on gcn_linear: solve instead of training

    std::string tu_path;         // tu_benchmark: directory with the dataset files
    std::string tu_name;         // tu_benchmark: dataset prefix, e.g. NCI1
    std::string base_experiment; // tu_benchmark: which experiment to run on it

    static const std::vector<std::string>& experiment_names();
    static ExperimentConfig defaults(const std::string& name);
    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;
};

struct SweepRow {
    double grid_value = 0.0;
    std::size_t k = 1;
    std::string prompt_kind;
    std::string arch;
    double stat_mean = 0.0;
    double stat_std = 0.0;
    double stat_min = 0.0;
    double stat_max = 0.0;
    std::size_t n_trials = 0;
    double normalized_mean = 0.0; // stat_mean / mean target norm at this grid point
};

struct SweepReport {
    ExperimentConfig config;
    std::vector<SweepRow> rows;
    std::vector<TrialRecord> trials;
    std::vector<FitReport> fits;     // error_distribution only
    std::vector<BoundReport> bounds; // experiments with computable bounds
    std::vector<double> samples;     // error_distribution: raw epsilon samples
    bool incomplete = false;

    std::string to_csv() const; // fixed header, deterministic body
    std::string to_json() const;
};

/// Runs one catalog entry. Repeats are dispatched across OpenMP threads with
/// per-trial random streams; aggregation is serial, so the report is
/// identical for any thread count.
SweepReport run_experiment(const ExperimentConfig& cfg);

/// Writes <name>_<timestamp>.csv / .json into out_dir; returns the paths.
std::vector<std::string> emit_report(const SweepReport& report, const std::string& out_dir,
                                     bool write_csv, bool write_json);

} // namespace gplab
