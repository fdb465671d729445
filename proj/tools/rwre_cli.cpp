#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rwre/errors.hpp"
#include "rwre/experiment.hpp"

namespace {

using nlohmann::json;

// Every flag writes straight into the override object; merge order is
// defaults < config file < command line, and the merged result is snapshotted
// by the runner.
void add_common_options(CLI::App* cmd, json& ov) {
    cmd->add_option_function<int>("--d", [&ov](int v) { ov["d"] = v; }, "lattice dimension");
    cmd->add_option_function<std::string>(
        "--law", [&ov](const std::string& v) { ov["law_kind"] = v; },
        "environment law: drift|epsbias|dirichlet");
    cmd->add_option_function<double>("--kappa", [&ov](double v) { ov["kappa"] = v; },
                                     "ellipticity constant");
    cmd->add_option_function<double>("--delta", [&ov](double v) { ov["delta"] = v; },
                                     "epsbias drift size");
    cmd->add_option_function<std::vector<double>>(
        "--alpha", [&ov](const std::vector<double>& v) { ov["alpha"] = v; },
        "dirichlet parameters (2d values)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&ov](std::uint64_t v) { ov["master_seed"] = v; }, "master seed");
    cmd->add_option_function<int>("--workers", [&ov](int v) { ov["workers"] = v; },
                                  "worker pool width (0 = all cores)");
    cmd->add_option_function<std::string>(
        "--out-dir", [&ov](const std::string& v) { ov["out_dir"] = v; }, "artifact directory");
    cmd->add_option_function<std::vector<double>>(
        "--direction", [&ov](const std::vector<double>& v) { ov["direction"] = v; },
        "direction l (normalized)");
    cmd->add_flag_callback("--dry-run", [&ov] { ov["dry_run"] = true; },
                           "validate and print the realized plan without computing");
}

void add_box_options(CLI::App* cmd, json& ov) {
    cmd->add_option_function<double>("--criterion-L", [&ov](double v) { ov["criterion_L"] = v; },
                                     "use the criterion box (L-2, L+2, ltilde_factor*L)");
    cmd->add_option_function<double>("--neg-extent", [&ov](double v) { ov["neg_extent"] = v; }, "");
    cmd->add_option_function<double>("--pos-extent", [&ov](double v) { ov["pos_extent"] = v; }, "");
    cmd->add_option_function<double>("--transverse", [&ov](double v) { ov["transverse"] = v; }, "");
    cmd->add_option_function<double>("--ltilde-factor", [&ov](double v) { ov["ltilde_factor"] = v; }, "");
}

void add_grid_options(CLI::App* cmd, json& ov) {
    cmd->add_option_function<std::vector<double>>(
        "--L-grid", [&ov](const std::vector<double>& v) { ov["L_grid"] = v; }, "scale grid");
    cmd->add_option_function<int>("--n-env", [&ov](int v) { ov["n_env"] = v; },
                                  "environments per grid point");
    cmd->add_option_function<long>("--n-walks", [&ov](long v) { ov["n_walks"] = v; },
                                   "walks per level");
}

void add_exponent_options(CLI::App* cmd, json& ov) {
    cmd->add_option_function<double>("--gamma", [&ov](double v) { ov["gamma"] = v; }, "");
    cmd->add_option_function<double>("--beta", [&ov](double v) { ov["beta"] = v; }, "");
    cmd->add_option_function<double>("--beta0", [&ov](double v) { ov["beta0"] = v; }, "");
    cmd->add_option_function<double>("--zeta", [&ov](double v) { ov["zeta"] = v; }, "");
    cmd->add_option_function<double>("--b", [&ov](double v) { ov["b"] = v; }, "");
    cmd->add_option_function<double>("--c", [&ov](double v) { ov["c"] = v; }, "");
    cmd->add_option_function<double>("--rho-coef", [&ov](double v) { ov["rho_coef"] = v; }, "");
    cmd->add_option_function<double>("--a", [&ov](double v) { ov["a"] = v; }, "moment power");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification laboratory for RWRE ballisticity conditions"};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    json ov = json::object();
    add_common_options(&app, ov);

    struct SubDef {
        const char* name;
        const char* help;
    };
    const std::vector<SubDef> subs = {
        {"theory", "closed-form evaluations (gamma_d, x*, f, F, ladder, ...)"},
        {"quenched-exit", "exact quenched exit distribution from a box"},
        {"simulate", "simulate quenched or annealed walks"},
        {"regen", "regeneration-time scan of simulated walks"},
        {"effective-criterion", "effective-criterion grid scan"},
        {"tgamma-fit", "slab back-exit decay fit"},
        {"atypical-tail", "atypical quenched exit tail frequencies"},
        {"seed-check", "seed-estimate scaling check"},
        {"decompose", "band decomposition of E[rho^a]"},
        {"env-snapshot", "save or verify an environment snapshot"},
    };
    for (const SubDef& def : subs) {
        CLI::App* cmd = app.add_subcommand(def.name, def.help);
        add_common_options(cmd, ov);
        add_box_options(cmd, ov);
        add_grid_options(cmd, ov);
        add_exponent_options(cmd, ov);
    }

    CLI::App* theory = app.get_subcommand("theory");
    theory->add_option_function<long long>(
        "--gamma-d", [&ov](long long d) {
            ov["theory_op"] = "gamma-d";
            ov["theory_d"] = d;
        },
        "print gamma_d for the given dimension");
    theory->add_option_function<std::string>(
        "--op", [&ov](const std::string& v) { ov["theory_op"] = v; },
        "gamma-d|fixed-point|f-beta|f-eps|big-f|iterate-f|seed-exponent|interpolation|ladder");
    theory->add_flag_callback("--ladder", [&ov] { ov["theory_op"] = "ladder"; },
                              "build the beta ladder for (gamma, d)");
    theory->add_flag_callback("--fixed-point", [&ov] { ov["theory_op"] = "fixed-point"; },
                              "print x* for (gamma, d)");
    theory->add_option_function<double>("--eps", [&ov](double v) { ov["eps"] = v; }, "");
    theory->add_option_function<double>("--x0", [&ov](double v) { ov["x0"] = v; }, "");
    theory->add_option_function<double>("--safety", [&ov](double v) { ov["safety"] = v; }, "");
    theory->add_option_function<double>("--f0", [&ov](double v) { ov["f0"] = v; }, "");
    theory->add_flag_callback("--literal-gamma", [&ov] { ov["stop_on_literal_gamma"] = true; },
                              "count the stopping index from iterates of gamma instead of 2 gamma");

    CLI::App* simulate = app.get_subcommand("simulate");
    CLI::App* regen = app.get_subcommand("regen");
    for (CLI::App* cmd : {simulate, regen}) {
        cmd->add_option_function<std::string>(
            "--walk", [&ov](const std::string& v) { ov["walk_kind"] = v; }, "quenched|annealed");
        cmd->add_option_function<std::string>(
            "--stop", [&ov](const std::string& v) { ov["stop"] = v; }, "slab|box|level|steps");
        cmd->add_option_function<double>("--slab-b", [&ov](double v) { ov["slab_b"] = v; }, "");
        cmd->add_option_function<double>("--slab-L", [&ov](double v) { ov["slab_L"] = v; }, "");
        cmd->add_option_function<double>("--level-u", [&ov](double v) { ov["level_u"] = v; }, "");
        cmd->add_option_function<double>("--overshoot", [&ov](double v) { ov["overshoot"] = v; }, "");
        cmd->add_option_function<long>("--steps", [&ov](long v) { ov["steps"] = v; }, "");
        cmd->add_option_function<int>("--n-paths", [&ov](int v) { ov["n_paths"] = v; }, "");
        cmd->add_option_function<std::vector<long>>(
            "--start", [&ov](const std::vector<long>& v) { ov["start"] = v; }, "start site");
        cmd->add_option_function<double>("--margin", [&ov](double v) { ov["regen_margin"] = v; },
                                         "regeneration confirmation margin (-1 = auto)");
    }

    CLI::App* snapshot = app.get_subcommand("env-snapshot");
    snapshot->add_option_function<std::string>(
        "--file", [&ov](const std::string& v) { ov["snapshot_path"] = v; }, "snapshot file path");
    snapshot->add_option_function<std::string>(
        "--verify", [&ov](const std::string& v) { ov["verify_path"] = v; },
        "verify an existing snapshot against the configured environment");
    snapshot->add_option_function<std::vector<long>>(
        "--region-lo", [&ov](const std::vector<long>& v) { ov["region_lo"] = v; }, "");
    snapshot->add_option_function<std::vector<long>>(
        "--region-hi", [&ov](const std::vector<long>& v) { ov["region_hi"] = v; }, "");
    snapshot->add_flag_callback("--include-boundary", [&ov] { ov["include_boundary"] = true; }, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json merged = rwre::config_to_json(rwre::ExperimentConfig{});
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            json file_json = json::parse(f);
            merged.update(file_json);
        }
        merged.update(ov);
        for (const auto& def : subs) {
            if (app.got_subcommand(def.name)) merged["subcommand"] = def.name;
        }
        if (merged["subcommand"].get<std::string>().empty()) {
            std::cerr << "no subcommand given (and none in the config file)\n";
            return 2;
        }
        const rwre::ExperimentConfig cfg = rwre::config_from_json(merged);
        return rwre::run_subcommand(cfg, std::cout, std::cerr);
    } catch (const rwre::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
