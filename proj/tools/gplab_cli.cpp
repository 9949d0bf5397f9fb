// Command-line front end: model/data generation, the experiment catalog,
// distribution fitting, and closed-form bound evaluation.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gplab/experiments.hpp"

using namespace gplab;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

json graph_to_json(const Graph& g) {
    json j;
    j["n_nodes"] = g.n_nodes;
    j["adjacency"] = g.adjacency.data();
    j["feature_dim"] = g.feature_dim();
    j["features"] = g.features.data();
    return j;
}

int cmd_gen_model(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    std::size_t layers = 3, feature_dim = 25, rank_loss = 0;
    std::string arch = "gcn", scheme = "sym_normalized";
    double slope = 0.2;
    bool all_layers = false;
    if (!config_path.empty()) {
        json j = json::parse(read_file(config_path));
        layers = j.value("n_layers", layers);
        feature_dim = j.value("feature_dim", feature_dim);
        rank_loss = j.value("rank_loss", rank_loss);
        arch = j.value("arch", arch);
        scheme = j.value("scheme", scheme);
        slope = j.value("leaky_slope", slope);
        all_layers = j.value("deficient_all_layers", all_layers);
    }
    RngStream rng(seed, 0);
    FrozenModel m = init_frozen_model(layers, feature_dim, arch_from_string(arch), rank_loss,
                                      slope, Readout{}, diffusion_scheme_from_string(scheme), rng,
                                      all_layers);
    save_model_file(m, out);
    std::cout << "wrote model: " << out << "\n";
    return 0;
}

int cmd_gen_data(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    DatasetSpec spec;
    spec.n_graphs = 10;
    if (!config_path.empty()) {
        json j = json::parse(read_file(config_path));
        spec.n_graphs = j.value("n_graphs", spec.n_graphs);
        spec.feature_dim = j.value("feature_dim", spec.feature_dim);
        spec.avg_nodes = j.value("avg_nodes", spec.avg_nodes);
        spec.density = j.value("density", spec.density);
    }
    RngStream rng(seed, 0);
    std::vector<Graph> graphs = generate_dataset(spec, rng);
    json j;
    j["n_graphs"] = graphs.size();
    j["graphs"] = json::array();
    for (const auto& g : graphs) j["graphs"].push_back(graph_to_json(g));
    write_file(out, j.dump(2));
    std::cout << "wrote " << graphs.size() << " graphs: " << out << "\n";
    return 0;
}

int cmd_run(const std::string& experiment, const std::string& config_path, std::uint64_t seed,
            bool seed_set, const std::string& out_dir, bool csv, bool json_fmt) {
    ExperimentConfig cfg = config_path.empty()
                               ? ExperimentConfig::defaults(experiment)
                               : ExperimentConfig::from_json(read_file(config_path));
    if (!experiment.empty()) cfg.name = experiment;
    if (seed_set) cfg.root_seed = seed;
    SweepReport report = run_experiment(cfg);
    std::vector<std::string> paths = emit_report(report, out_dir, csv, json_fmt);
    for (const auto& p : paths) std::cout << "wrote: " << p << "\n";
    if (report.incomplete) {
        std::cerr << "warning: some trials failed; report flagged incomplete\n";
        return 1;
    }
    return 0;
}

int cmd_fit_dist(const std::string& in_path, const std::string& family, double fixed_dof,
                 const std::string& out) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot read samples: " + in_path);
    std::vector<double> samples;
    double x;
    while (in >> x) samples.push_back(x);
    json j = json::array();
    std::vector<std::string> families =
        family == "all" ? std::vector<std::string>{"chi", "gamma", "chi_squared", "exponential"}
                        : std::vector<std::string>{family};
    for (const auto& f : families) {
        FitReport rep = fit_error_distribution(samples, dist_family_from_string(f), fixed_dof);
        j.push_back(json::parse(rep.to_json()));
    }
    std::string body = j.dump(2);
    if (out.empty())
        std::cout << body << "\n";
    else
        write_file(out, body);
    return 0;
}

int cmd_bounds(const std::string& config_path, const std::string& out) {
    json j = json::parse(read_file(config_path));
    auto targets = j.at("targets").get<std::vector<std::vector<double>>>();
    json result;
    if (j.contains("lambdas")) {
        auto lambdas = j.at("lambdas").get<std::vector<double>>();
        SinglePromptBound b = single_prompt_lower_bound(targets, lambdas);
        result["single_lower"] = {{"p_star", b.p_star},
                                  {"j_min", b.j_min},
                                  {"rmse_bound", b.rmse_bound}};
    }
    std::size_t k = j.value("k", std::size_t{1});
    MultiPromptBound mb = multi_prompt_upper_bound(targets, k);
    result["multi_upper"] = {{"k", k},
                             {"epsilon_star", mb.epsilon_star},
                             {"eigenvalues", mb.eigenvalues}};
    std::string body = result.dump(2);
    if (out.empty())
        std::cout << body << "\n";
    else
        write_file(out, body);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for graph prompting over frozen models"};
    app.require_subcommand(1);

    std::string config_path, out, experiment, family = "all", samples_path;
    std::uint64_t seed = 1;
    double fixed_dof = 0.0;
    bool no_csv = false, no_json = false;

    auto* gen_model = app.add_subcommand("gen-model", "generate and save a frozen model");
    gen_model->add_option("--config", config_path, "JSON config file");
    gen_model->add_option("--seed", seed, "random seed");
    gen_model->add_option("--out", out, "output model file")->required();

    auto* gen_data = app.add_subcommand("gen-data", "generate and save a synthetic dataset");
    gen_data->add_option("--config", config_path, "JSON config file");
    gen_data->add_option("--seed", seed, "random seed");
    gen_data->add_option("--out", out, "output dataset file")->required();

    auto* run = app.add_subcommand("run", "run a catalog experiment");
    run->add_option("experiment", experiment, "experiment name")->required();
    run->add_option("--config", config_path, "JSON config file");
    auto* seed_opt = run->add_option("--seed", seed, "root seed override");
    run->add_option("--out", out, "output directory")->required();
    run->add_flag("--no-csv", no_csv, "skip CSV output");
    run->add_flag("--no-json", no_json, "skip JSON output");

    auto* fit = app.add_subcommand("fit-dist", "fit error-distribution families to samples");
    fit->add_option("--in", samples_path, "whitespace-separated sample file")->required();
    fit->add_option("--family", family, "chi | gamma | chi_squared | exponential | all");
    fit->add_option("--fixed-dof", fixed_dof, "pin chi degrees of freedom");
    fit->add_option("--out", out, "output file (stdout when omitted)");

    auto* bounds = app.add_subcommand("bounds", "closed-form error bounds from target vectors");
    bounds->add_option("--config", config_path, "JSON with targets, optional lambdas and k")
        ->required();
    bounds->add_option("--out", out, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_model->parsed()) return cmd_gen_model(config_path, seed, out);
        if (gen_data->parsed()) return cmd_gen_data(config_path, seed, out);
        if (run->parsed())
            return cmd_run(experiment, config_path, seed, seed_opt->count() > 0, out, !no_csv,
                           !no_json);
        if (fit->parsed()) return cmd_fit_dist(samples_path, family, fixed_dof, out);
        if (bounds->parsed()) return cmd_bounds(config_path, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
