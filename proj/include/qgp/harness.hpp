#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qgp/kernels.hpp"
#include "qgp/nbody.hpp"

namespace qgp {

// Flat experiment configuration. Parsed from a flat JSON object whose keys
// match the field names below; unknown keys are rejected. Every output file
// carries the config hash and seed in its header.
struct ExperimentConfig {
    std::string experiment;  // nls | nbody-converge | duhamel-residual |
                             // boardgame | bounds | commutation
    std::uint64_t seed = 1;
    int threads = 1;

    // grid
    int d = 1;
    int M = 32;
    double L = 2.0 * 3.14159265358979323846;

    // physics
    std::string v_family = "gaussian";  // gaussian | constant | zero
    double v_amplitude = 2.5;
    double v_width = 0.45;
    double beta = 0.1;
    double b0_override = -1.0;  // < 0: use quadrature b0 of V
    double lambda2 = 0.0;
    double lambda3 = 0.0;

    // numerics
    double dt = 1e-3;
    double T = 0.1;
    int record_every = 1;
    int quad_nodes = 256;
    int samples = 100;
    double alpha = 0.75;
    double p_exponent = 2.0;
    double kappa = 0.5;
    int k_order = 1;
    std::string initial = "gaussian";  // gaussian | plane
    double init_amplitude = 1.0;
    double init_sigma = 0.5;
    bool dump_fields = false;

    // board game
    int r = 2;
    int n = 3;

    // nbody
    std::vector<int> N_list = {3, 4, 5};

    // bounds probe selection
    std::string probe = "all";

    // commutation
    int comm_rank = 3;
    int comm_order = 7;
    int comm_count = 20;

    // resource caps
    std::uint64_t mem_cap_bytes = 2ull << 30;
    std::uint64_t enum_cap = 10'000'000;
    int move_budget = 0;  // 0: default n^2 (r+2n)
    int rank_cap = kDefaultRankCap;

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string canonical_json() const;
    std::uint64_t config_hash() const;

    // Collects every violated constraint; throws ValidationError listing all.
    void validate() const;
};

// Runs one experiment, writing CSV/JSON artifacts into out_dir. Returns the
// list of files written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg,
                                                  const std::filesystem::path& out_dir);

// Library entry points used by the harness and the acceptance suite.
struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    int selected_M = 0;
    double b0 = 0.0;
    double dt_used = 0.0;
};
ConvergenceResult convergence_experiment(const ExperimentConfig& cfg);

struct ResidualLadder {
    std::vector<std::pair<int, double>> residuals;  // (nodes, residual)
    double anti_test = 0.0;                         // residual with 2 b0 on the rhs
};
ResidualLadder duhamel_residual_ladder(const ExperimentConfig& cfg);

const std::string& experiment_anchor(const std::string& experiment);
std::vector<std::string> experiment_names();

}  // namespace qgp
