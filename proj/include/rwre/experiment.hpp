#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace rwre {

inline constexpr const char* kToolVersion = "rwre-lab 1.0.0";

/// One config drives one run. Every field has a default; the merged config
/// (defaults, file, flag overrides) is snapshotted next to the artifacts so a
/// run can be replayed from the snapshot alone.
struct ExperimentConfig {
    std::string subcommand;

    int d = 2;
    std::string law_kind = "dirichlet";  // drift | epsbias | dirichlet
    double kappa = 0.01;
    double delta = 0.1;
    std::vector<double> alpha;  // empty => all-ones
    std::uint64_t master_seed = 1;
    int workers = 0;  // 0 => all logical cores
    std::string out_dir = "out";

    std::vector<double> direction;  // empty => e1

    // box (quenched-exit, decompose, env-snapshot): criterion_L > 0 selects the
    // criterion box (L-2, L+2, ltilde_factor*L), otherwise explicit extents.
    double criterion_L = 0.0;
    double neg_extent = 1.0;
    double pos_extent = 1.0;
    double transverse = 1.0;

    std::vector<long> start;  // empty => origin

    // walk rules (simulate, regen)
    std::string walk_kind = "quenched";  // quenched | annealed
    std::string stop = "steps";          // slab | box | level | steps
    double slab_b = 1.0;
    double slab_L = 10.0;
    double level_u = 10.0;
    double overshoot = 0.0;
    long steps = 100;
    long step_cap = 100000000;
    int n_paths = 1;

    long n_walks = 10000;
    int n_env = 1000;

    std::vector<double> L_grid = {6.0, 10.0, 14.0};
    std::vector<double> a_alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    bool a_include_zero = true;
    bool a_include_one = true;
    double ltilde_factor = 3.0;
    double c1 = 1.0;
    double c2 = 5.0;

    double a = 0.5;  // decompose moment power
    double gamma = 0.45;
    double beta = 0.8;
    double beta0 = 0.6;
    double zeta = 0.3;
    double b = 1.0;
    double c = 1.0;
    double rho_coef = 1.0;
    double eta = 1.0;
    double safety = 0.01;
    std::vector<double> ks;
    std::vector<double> betas;
    double path_count_constant = 4.0;
    double regen_margin = -1.0;
    bool stop_on_literal_gamma = false;

    double solver_tolerance = 1e-12;
    long solver_max_sweeps = 1000000;
    std::string solver_mode = "sweeps";  // sweeps | dense

    std::string theory_op = "gamma-d";
    long long theory_d = 2;
    double eps = 1e-3;
    double x0 = 0.9;
    int j_max = 16;
    double f0 = 0.1;

    std::string snapshot_path;  // empty => <out_dir>/env.snapshot
    std::vector<long> region_lo;
    std::vector<long> region_hi;
    bool include_boundary = false;
    std::string verify_path;

    bool dry_run = false;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Hash of the semantic fields (out_dir, workers and dry_run excluded: they
/// cannot change results).
std::string config_hash(const ExperimentConfig& cfg);

/// Runs a subcommand, writing artifacts under cfg.out_dir. Returns the
/// process exit code: 0 ok, 2 validation/config error, 3 numerical failure.
int run_subcommand(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace rwre
