#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "gplab/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gplab;

namespace {

ExperimentConfig tiny_sweep() {
    ExperimentConfig cfg = ExperimentConfig::defaults("rank_loss_sweep");
    cfg.grid = {0, 3};
    cfg.prompt_kinds = {"gpf"};
    cfg.n_models = 1;
    cfg.n_repeats = 2;
    cfg.feature_dim = 5;
    cfg.avg_nodes = 6;
    cfg.n_layers = 2;
    cfg.hp.max_epochs = 25;
    cfg.hp.learning_rate = 1e-2;
    cfg.hp.restarts = 1;
    cfg.root_seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("defaults exist for every catalog entry") {
    for (const auto& name : ExperimentConfig::experiment_names()) {
        ExperimentConfig cfg = ExperimentConfig::defaults(name);
        CHECK(cfg.name == name);
        CHECK(!cfg.grid.empty());
    }
    CHECK_THROWS(ExperimentConfig::defaults("bogus"));
}

TEST_CASE("config json round-trip preserves overrides") {
    ExperimentConfig cfg = tiny_sweep();
    cfg.target_mode = "gaussian";
    cfg.target_noise = 0.5;
    ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.name == cfg.name);
    CHECK(back.grid == cfg.grid);
    CHECK(back.n_repeats == cfg.n_repeats);
    CHECK(back.hp.max_epochs == cfg.hp.max_epochs);
    CHECK(back.target_mode == "gaussian");
    CHECK(back.target_noise == 0.5);
    CHECK_THROWS(ExperimentConfig::from_json("{\"name\":\"rank_loss_sweep\",\"archs\":[\"x\"]}"));
}

TEST_CASE("tiny sweep produces consistent rows and csv") {
    SweepReport rep = run_experiment(tiny_sweep());
    REQUIRE(rep.rows.size() == 2); // two grid points, one kind, one arch
    CHECK_FALSE(rep.incomplete);
    for (const auto& r : rep.rows) {
        CHECK(r.n_trials == 2);
        CHECK(r.stat_min <= r.stat_mean + 1e-15);
        CHECK(r.stat_mean <= r.stat_max + 1e-15);
    }
    CHECK(rep.trials.size() == 4);
    std::string csv = rep.to_csv();
    CHECK(csv.rfind("grid_value,prompt_kind,arch,stat_mean,stat_std,stat_min,stat_max,n_trials\n",
                    0) == 0);
    // one header + one line per row
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("re-running with the same seed is byte-identical across thread counts") {
    ExperimentConfig cfg = tiny_sweep();
    cfg.n_repeats = 4;
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    std::string csv1 = run_experiment(cfg).to_csv();
#ifdef _OPENMP
    omp_set_num_threads(saved > 1 ? saved : 4);
#endif
    std::string csv2 = run_experiment(cfg).to_csv();
    std::string csv3 = run_experiment(cfg).to_csv();
    CHECK(csv1 == csv2);
    CHECK(csv2 == csv3);
}

TEST_CASE("single-trial degenerate run") {
    ExperimentConfig cfg = tiny_sweep();
    cfg.grid = {2};
    cfg.n_models = 1;
    cfg.n_repeats = 1;
    SweepReport rep = run_experiment(cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].n_trials == 1);
    CHECK(rep.rows[0].stat_mean == rep.rows[0].stat_min);
    CHECK(rep.rows[0].stat_mean == rep.rows[0].stat_max);
    CHECK(rep.rows[0].stat_std == 0.0);
}

TEST_CASE("closed-form error_distribution run yields samples and four fits") {
    ExperimentConfig cfg = ExperimentConfig::defaults("error_distribution");
    cfg.n_models = 1;
    cfg.n_repeats = 60;
    cfg.feature_dim = 12;
    cfg.avg_nodes = 8;
    cfg.n_layers = 2;
    cfg.root_seed = 5;
    SweepReport rep = run_experiment(cfg);
    CHECK(rep.samples.size() >= 30);
    REQUIRE(rep.fits.size() == 4);
    // chi report carries the fixed-dof companion numbers
    CHECK(rep.fits[0].family == DistFamily::Chi);
    CHECK(rep.fits[0].params.count("fixed_dof_p_value") == 1);
}

TEST_CASE("emit_report writes the requested files") {
    ExperimentConfig cfg = tiny_sweep();
    SweepReport rep = run_experiment(cfg);
    std::string dir = "emit_test_out";
    std::remove((dir + "/x").c_str());
    std::system(("mkdir -p " + dir).c_str());
    auto paths = emit_report(rep, dir, true, true);
    REQUIRE(paths.size() == 2);
    for (const auto& p : paths) {
        std::ifstream in(p);
        CHECK(static_cast<bool>(in));
    }
    CHECK_THROWS(emit_report(rep, "/nonexistent_dir_zzz", true, false));
}

TEST_CASE("invalid configs are rejected") {
    ExperimentConfig cfg = tiny_sweep();
    cfg.grid.clear();
    CHECK_THROWS(run_experiment(cfg));
    ExperimentConfig tu = ExperimentConfig::defaults("tu_benchmark");
    CHECK_THROWS(run_experiment(tu)); // no path configured
}
