#include "rwre/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rwre/criteria.hpp"
#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"
#include "rwre/parallel.hpp"
#include "rwre/quenched.hpp"
#include "rwre/rng.hpp"
#include "rwre/theory.hpp"
#include "rwre/walker.hpp"

namespace rwre {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

struct Loader {
    const json& j;
    std::set<std::string> known;

    template <class T>
    void field(const char* key, T& into) {
        known.insert(key);
        if (auto it = j.find(key); it != j.end()) {
            try {
                into = it->get<T>();
            } catch (const json::exception& e) {
                throw ValidationError(std::string("config field '") + key + "': " + e.what());
            }
        }
    }

    void finish() const {
        for (const auto& item : j.items()) {
            if (!known.count(item.key())) {
                throw ValidationError("unknown config field: " + item.key());
            }
        }
    }
};

template <class Cfg, class Fn>
void for_each_field(Cfg& cfg, Fn&& fn) {
    fn("subcommand", cfg.subcommand);
    fn("d", cfg.d);
    fn("law_kind", cfg.law_kind);
    fn("kappa", cfg.kappa);
    fn("delta", cfg.delta);
    fn("alpha", cfg.alpha);
    fn("master_seed", cfg.master_seed);
    fn("workers", cfg.workers);
    fn("out_dir", cfg.out_dir);
    fn("direction", cfg.direction);
    fn("criterion_L", cfg.criterion_L);
    fn("neg_extent", cfg.neg_extent);
    fn("pos_extent", cfg.pos_extent);
    fn("transverse", cfg.transverse);
    fn("start", cfg.start);
    fn("walk_kind", cfg.walk_kind);
    fn("stop", cfg.stop);
    fn("slab_b", cfg.slab_b);
    fn("slab_L", cfg.slab_L);
    fn("level_u", cfg.level_u);
    fn("overshoot", cfg.overshoot);
    fn("steps", cfg.steps);
    fn("step_cap", cfg.step_cap);
    fn("n_paths", cfg.n_paths);
    fn("n_walks", cfg.n_walks);
    fn("n_env", cfg.n_env);
    fn("L_grid", cfg.L_grid);
    fn("a_alphas", cfg.a_alphas);
    fn("a_include_zero", cfg.a_include_zero);
    fn("a_include_one", cfg.a_include_one);
    fn("ltilde_factor", cfg.ltilde_factor);
    fn("c1", cfg.c1);
    fn("c2", cfg.c2);
    fn("a", cfg.a);
    fn("gamma", cfg.gamma);
    fn("beta", cfg.beta);
    fn("beta0", cfg.beta0);
    fn("zeta", cfg.zeta);
    fn("b", cfg.b);
    fn("c", cfg.c);
    fn("rho_coef", cfg.rho_coef);
    fn("eta", cfg.eta);
    fn("safety", cfg.safety);
    fn("ks", cfg.ks);
    fn("betas", cfg.betas);
    fn("path_count_constant", cfg.path_count_constant);
    fn("regen_margin", cfg.regen_margin);
    fn("stop_on_literal_gamma", cfg.stop_on_literal_gamma);
    fn("solver_tolerance", cfg.solver_tolerance);
    fn("solver_max_sweeps", cfg.solver_max_sweeps);
    fn("solver_mode", cfg.solver_mode);
    fn("theory_op", cfg.theory_op);
    fn("theory_d", cfg.theory_d);
    fn("eps", cfg.eps);
    fn("x0", cfg.x0);
    fn("j_max", cfg.j_max);
    fn("f0", cfg.f0);
    fn("snapshot_path", cfg.snapshot_path);
    fn("region_lo", cfg.region_lo);
    fn("region_hi", cfg.region_hi);
    fn("include_boundary", cfg.include_boundary);
    fn("verify_path", cfg.verify_path);
    fn("dry_run", cfg.dry_run);
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// ---------------------------------------------------------------------------
// Run context: artifacts, provenance, logging
// ---------------------------------------------------------------------------

struct RunContext {
    ExperimentConfig cfg;
    std::string hash;
    fs::path out_dir;
    std::ostream* out = nullptr;

    std::string provenance_csv() const {
        std::ostringstream os;
        os << "# " << kToolVersion << "\n"
           << "# subcommand: " << cfg.subcommand << "\n"
           << "# config_hash: " << hash << "\n"
           << "# master_seed: " << cfg.master_seed << "\n"
           << "# timestamp: " << iso_timestamp() << "\n";
        return os.str();
    }

    json envelope() const {
        json j;
        j["tool_version"] = kToolVersion;
        j["subcommand"] = cfg.subcommand;
        j["config_hash"] = hash;
        j["master_seed"] = cfg.master_seed;
        j["timestamp"] = iso_timestamp();
        return j;
    }

    void write_csv(const std::string& name, const std::string& body) const {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw IoError("cannot write artifact: " + name);
        f << provenance_csv() << body;
    }

    void write_json(const std::string& name, json payload) const {
        json j = envelope();
        j["payload"] = std::move(payload);
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw IoError("cannot write artifact: " + name);
        f << j.dump(2) << "\n";
    }

    void log(const std::string& message) const {
        std::ofstream f(out_dir / "run.log", std::ios::app);
        f << iso_timestamp() << " [" << cfg.subcommand << "] " << message << "\n";
    }
};

// ---------------------------------------------------------------------------
// Config -> domain objects
// ---------------------------------------------------------------------------

EnvironmentLaw law_from_config(const ExperimentConfig& cfg) {
    if (cfg.law_kind == "drift") return EnvironmentLaw::deterministic_drift(cfg.d, cfg.kappa);
    if (cfg.law_kind == "epsbias") return EnvironmentLaw::epsilon_biased(cfg.d, cfg.delta, cfg.kappa);
    if (cfg.law_kind == "dirichlet") {
        std::vector<double> alpha = cfg.alpha;
        if (alpha.empty()) alpha.assign(static_cast<std::size_t>(2 * cfg.d), 1.0);
        return EnvironmentLaw::dirichlet(cfg.d, std::move(alpha), cfg.kappa);
    }
    throw ValidationError("unknown law_kind: " + cfg.law_kind + " (drift|epsbias|dirichlet)");
}

Direction direction_from_config(const ExperimentConfig& cfg) {
    if (cfg.direction.empty()) return Direction::axis(cfg.d, 0);
    if (cfg.direction.size() != static_cast<std::size_t>(cfg.d)) {
        throw ValidationError("direction must have d components");
    }
    return Direction::from(cfg.direction);
}

Site start_from_config(const ExperimentConfig& cfg) {
    Site s{};
    if (cfg.start.empty()) return s;
    if (cfg.start.size() != static_cast<std::size_t>(cfg.d)) {
        throw ValidationError("start must have d components");
    }
    for (int i = 0; i < cfg.d; ++i) s.c[i] = static_cast<std::int32_t>(cfg.start[static_cast<std::size_t>(i)]);
    return s;
}

BoxSpec box_from_config(const ExperimentConfig& cfg) {
    const Rotation rot = rotation_from_direction(direction_from_config(cfg));
    if (cfg.criterion_L > 0.0) {
        return BoxSpec::criterion(rot, cfg.criterion_L, cfg.ltilde_factor * cfg.criterion_L);
    }
    return BoxSpec(rot, cfg.neg_extent, cfg.pos_extent, cfg.transverse);
}

SolverConfig solver_from_config(const ExperimentConfig& cfg) {
    SolverConfig sc;
    sc.tolerance = cfg.solver_tolerance;
    sc.max_sweeps = cfg.solver_max_sweeps;
    if (cfg.solver_mode == "sweeps") {
        sc.mode = SolverConfig::Mode::sweeps;
    } else if (cfg.solver_mode == "dense") {
        sc.mode = SolverConfig::Mode::dense;
    } else {
        throw ValidationError("solver_mode must be sweeps or dense");
    }
    return sc;
}

AGrid a_grid_from_config(const ExperimentConfig& cfg) {
    AGrid g;
    g.alphas = cfg.a_alphas;
    g.include_zero = cfg.a_include_zero;
    g.include_one = cfg.a_include_one;
    return g;
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

json decay_to_json(const DecayFit& fit) {
    json j;
    j["exponent"] = fit.exponent;
    j["levels"] = fit.levels;
    j["counts"] = fit.counts;
    j["n_eff"] = fit.n_eff;
    j["freqs"] = fit.freqs;
    j["n_zero_counts"] = fit.n_zero_counts;
    j["fit_available"] = fit.fit_available;
    if (fit.fit_available) {
        j["delta"] = fit.slope;
        j["delta_ci95"] = fit.slope_ci;
        j["intercept"] = fit.intercept;
    }
    if (!fit.thresholds.empty()) j["thresholds"] = fit.thresholds;
    if (!fit.ellipticity_floors.empty()) j["ellipticity_floors"] = fit.ellipticity_floors;
    if (!std::isnan(fit.zeta_admissible_bound)) {
        j["zeta_admissible_bound"] = fit.zeta_admissible_bound;
    }
    return j;
}

json criterion_to_json(const CriterionReport& report) {
    json j;
    j["kappa"] = report.kappa;
    j["c1"] = report.c1;
    j["c2"] = report.c2;
    j["n_env"] = report.n_env;
    j["inf_product"] = report.inf_product;
    j["verdict"] = verdict_name(report.verdict);
    j["argmin"] = report.argmin;
    json entries = json::array();
    for (const CriterionEntry& e : report.entries) {
        json je;
        je["L"] = e.L;
        je["Ltilde"] = e.Ltilde;
        je["a"] = e.a;
        je["mean"] = e.moment.mean;
        je["ci_half_width"] = e.moment.ci_half_width;
        je["n_excluded"] = e.moment.n_excluded;
        je["prefactor"] = e.prefactor;
        je["product"] = e.product;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j;
}

json bands_to_json(const BandDecomposition& bd) {
    json j;
    j["gamma"] = bd.gamma;
    j["a"] = bd.a;
    j["L"] = bd.L;
    j["ks"] = bd.ks;
    j["betas"] = bd.betas;
    j["total_mean"] = bd.total_mean;
    j["n_env"] = bd.n_env;
    j["n_excluded"] = bd.n_excluded;
    json arr = json::array();
    double band_total = 0.0;
    for (const Band& b : bd.bands) {
        json jb;
        jb["band"] = b.label;
        jb["lower"] = b.lower;
        jb["upper"] = b.upper;
        jb["count"] = b.count;
        jb["partial_sum"] = b.partial_sum;
        band_total += b.partial_sum;
        arr.push_back(std::move(jb));
    }
    j["bands"] = std::move(arr);
    j["band_total"] = band_total;
    return j;
}

json ladder_to_json(const theory::LadderResult& lr) {
    json j;
    j["gamma"] = lr.gamma;
    j["d"] = lr.d;
    j["safety"] = lr.safety;
    j["beta0"] = lr.beta0;
    j["lower_bound"] = lr.lower_bound;
    j["x_star"] = lr.x_star;
    j["betas"] = lr.betas;
    j["n"] = lr.n;
    j["iterates"] = lr.iterates;
    j["n_from_iterates"] = lr.n_from_iterates;
    j["feasible"] = lr.feasible;
    if (!lr.failure_reason.empty()) j["failure_reason"] = lr.failure_reason;
    json checks = json::array();
    for (const auto& c : lr.checks) {
        checks.push_back({{"line", c.line}, {"ok", c.ok}});
    }
    j["checks"] = std::move(checks);
    return j;
}

std::string decay_csv(const DecayFit& fit) {
    std::ostringstream os;
    write_decay_csv(fit, os);
    return os.str();
}

std::string decay_dat(const DecayFit& fit) {
    std::ostringstream os;
    write_decay_gnuplot(fit, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Subcommand handlers
// ---------------------------------------------------------------------------

void run_theory(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    json payload;
    payload["op"] = cfg.theory_op;
    char line[256];
    if (cfg.theory_op == "gamma-d") {
        const double v = theory::gamma_d(cfg.theory_d);
        payload["d"] = cfg.theory_d;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.6f", v);
    } else if (cfg.theory_op == "fixed-point") {
        const double v = theory::fixed_point(cfg.gamma, cfg.d);
        payload["gamma"] = cfg.gamma;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "f-beta") {
        const double v = theory::f_beta(cfg.gamma, cfg.d, cfg.beta);
        payload["gamma"] = cfg.gamma;
        payload["beta"] = cfg.beta;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "f-eps") {
        const double v = theory::f_eps(cfg.gamma, cfg.d, cfg.eps, cfg.beta);
        payload["gamma"] = cfg.gamma;
        payload["eps"] = cfg.eps;
        payload["beta"] = cfg.beta;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "big-f") {
        const double v = theory::big_F(cfg.gamma, cfg.d, cfg.x0);
        payload["gamma"] = cfg.gamma;
        payload["x0"] = cfg.x0;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "iterate-f") {
        const auto seq = theory::iterate_F(cfg.gamma, cfg.d, cfg.x0, cfg.j_max);
        payload["gamma"] = cfg.gamma;
        payload["x0"] = cfg.x0;
        payload["iterates"] = seq;
        std::snprintf(line, sizeof(line), "%zu iterates, last %.12g", seq.size(), seq.back());
    } else if (cfg.theory_op == "seed-exponent") {
        const double v = theory::seed_exponent(cfg.gamma, cfg.beta0, cfg.beta);
        payload["gamma"] = cfg.gamma;
        payload["beta0"] = cfg.beta0;
        payload["beta"] = cfg.beta;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "interpolation") {
        const double v = theory::interpolation_f(cfg.beta0, cfg.f0, cfg.d, cfg.beta);
        payload["beta0"] = cfg.beta0;
        payload["f0"] = cfg.f0;
        payload["beta"] = cfg.beta;
        payload["value"] = v;
        std::snprintf(line, sizeof(line), "%.12g", v);
    } else if (cfg.theory_op == "ladder") {
        const auto lr = theory::build_ladder(cfg.gamma, cfg.d, cfg.safety, cfg.stop_on_literal_gamma);
        payload = ladder_to_json(lr);
        payload["op"] = "ladder";
        std::snprintf(line, sizeof(line), "feasible=%s n=%d", lr.feasible ? "true" : "false", lr.n);
    } else {
        throw ValidationError("unknown theory op: " + cfg.theory_op);
    }
    ctx.write_json("theory.json", payload);
    (*ctx.out) << line << "\n";
}

void run_quenched_exit(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const EnvironmentLaw law = law_from_config(cfg);
    const Environment env(law, cfg.master_seed);
    const BoxSpec spec = box_from_config(cfg);
    const LatticeBox box = build_box(spec, cfg.start.empty());
    const ExitProblem problem{&env, &box, start_from_config(cfg)};
    const ExitDistribution dist = exit_distribution(problem, solver_from_config(cfg));

    json payload;
    payload["p_plus"] = dist.p_plus;
    payload["rho"] = dist.rho;
    payload["solver_residual"] = dist.solver_residual;
    payload["n_interior"] = box.interior.size();
    payload["n_boundary"] = dist.probs.size();
    ctx.write_json("quenched_exit.json", payload);

    std::ostringstream csv;
    csv << "x1";
    for (int i = 1; i < cfg.d; ++i) csv << ",x" << (i + 1);
    csv << ",prob,is_plus\n";
    char buf[40];
    std::unordered_set<Site, SiteHasher> plus(box.boundary_plus.begin(), box.boundary_plus.end());
    for (const auto& [site, prob] : dist.probs) {
        for (int i = 0; i < cfg.d; ++i) {
            if (i) csv << ',';
            csv << site.c[i];
        }
        std::snprintf(buf, sizeof(buf), "%.17g", prob);
        csv << ',' << buf << ',' << (plus.count(site) ? 1 : 0) << '\n';
    }
    ctx.write_csv("exit_distribution.csv", csv.str());

    char line[160];
    std::snprintf(line, sizeof(line), "p_plus=%.17g rho=%.17g residual=%.3g", dist.p_plus,
                  dist.rho, dist.solver_residual);
    (*ctx.out) << line << "\n";
}

StopRule stop_rule_from_config(const ExperimentConfig& cfg, const LatticeBox* box) {
    StopRule rule = [&] {
        if (cfg.stop == "slab") {
            return StopRule::slab(Slab(direction_from_config(cfg), cfg.slab_b, cfg.slab_L));
        }
        if (cfg.stop == "box") return StopRule::box(box);
        if (cfg.stop == "level") {
            return StopRule::level(direction_from_config(cfg), cfg.level_u, cfg.overshoot);
        }
        if (cfg.stop == "steps") return StopRule::steps(cfg.steps);
        throw ValidationError("unknown stop rule: " + cfg.stop + " (slab|box|level|steps)");
    }();
    rule.step_cap = cfg.step_cap;
    return rule;
}

std::vector<Path> simulate_paths(const ExperimentConfig& cfg, const LatticeBox* box) {
    const EnvironmentLaw law = law_from_config(cfg);
    const StopRule rule = stop_rule_from_config(cfg, box);
    const Site start = start_from_config(cfg);
    std::vector<Path> paths;
    if (cfg.n_paths < 1) throw ValidationError("n_paths must be >= 1");
    if (cfg.walk_kind == "quenched") {
        const Environment env(law, cfg.master_seed);
        for (int i = 0; i < cfg.n_paths; ++i) {
            paths.push_back(simulate_quenched(env, start, rule,
                                              seed_for_index(cfg.master_seed, static_cast<std::uint64_t>(i))));
        }
    } else if (cfg.walk_kind == "annealed") {
        for (int i = 0; i < cfg.n_paths; ++i) {
            paths.push_back(simulate_annealed(law, start, rule,
                                              seed_for_index(cfg.master_seed, static_cast<std::uint64_t>(i))));
        }
    } else {
        throw ValidationError("walk_kind must be quenched or annealed");
    }
    return paths;
}

std::string path_csv(const Path& p, int d) {
    std::ostringstream os;
    os << "step";
    for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
    os << "\n";
    for (std::size_t n = 0; n < p.sites.size(); ++n) {
        os << n;
        for (int i = 0; i < d; ++i) os << ',' << p.sites[n].c[i];
        os << "\n";
    }
    return os.str();
}

void run_simulate(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    LatticeBox box;
    const LatticeBox* box_ptr = nullptr;
    if (cfg.stop == "box") {
        box = build_box(box_from_config(cfg), cfg.start.empty());
        box_ptr = &box;
    }
    const std::vector<Path> paths = simulate_paths(cfg, box_ptr);
    json summary = json::array();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof(name), "path_%03zu.csv", i);
        ctx.write_csv(name, path_csv(paths[i], cfg.d));
        summary.push_back({{"file", name},
                           {"steps", paths[i].sites.size() - 1},
                           {"stop_reason", stop_reason_name(paths[i].stop_reason)}});
    }
    ctx.write_json("simulate.json", {{"paths", std::move(summary)}});
    (*ctx.out) << "paths=" << paths.size() << " last_stop="
               << stop_reason_name(paths.back().stop_reason) << "\n";
}

void run_regen(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    LatticeBox box;
    const LatticeBox* box_ptr = nullptr;
    if (cfg.stop == "box") {
        box = build_box(box_from_config(cfg), cfg.start.empty());
        box_ptr = &box;
    }
    const Direction l = direction_from_config(cfg);
    const std::vector<Path> paths = simulate_paths(cfg, box_ptr);
    json arr = json::array();
    std::size_t total_confirmed = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const RegenerationRecord rec = regeneration_times(paths[i], l, cfg.regen_margin);
        json jr;
        jr["path"] = i;
        jr["stop_reason"] = stop_reason_name(paths[i].stop_reason);
        jr["margin"] = rec.margin;
        jr["confirmed_times"] = rec.confirmed_times;
        if (rec.provisional_time) jr["provisional_time"] = *rec.provisional_time;
        arr.push_back(std::move(jr));
        total_confirmed += rec.confirmed_times.size();
    }
    ctx.write_json("regen.json", {{"records", std::move(arr)}});
    (*ctx.out) << "paths=" << paths.size() << " confirmed_regenerations=" << total_confirmed
               << "\n";
}

void run_effective_criterion(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const CriterionReport report = effective_criterion(
        law_from_config(cfg), direction_from_config(cfg), cfg.L_grid, cfg.ltilde_factor,
        a_grid_from_config(cfg), cfg.c1, cfg.c2, cfg.n_env, cfg.master_seed, cfg.workers,
        solver_from_config(cfg));
    std::ostringstream csv;
    write_criterion_csv(report, csv);
    ctx.write_csv("criterion.csv", csv.str());
    ctx.write_json("criterion.json", criterion_to_json(report));
    char line[160];
    std::snprintf(line, sizeof(line), "inf_product=%.17g verdict=%s", report.inf_product,
                  verdict_name(report.verdict));
    (*ctx.out) << line << "\n";
}

void decay_outputs(RunContext& ctx, const std::string& stem, const DecayFit& fit) {
    ctx.write_csv(stem + ".csv", decay_csv(fit));
    ctx.write_csv(stem + ".dat", decay_dat(fit));
    ctx.write_json(stem + ".json", decay_to_json(fit));
    char line[200];
    if (fit.fit_available) {
        std::snprintf(line, sizeof(line), "delta=%.17g ci95=%.17g zero_levels=%d", fit.slope,
                      fit.slope_ci, fit.n_zero_counts);
    } else {
        std::snprintf(line, sizeof(line), "fit unavailable: zero_levels=%d of %zu",
                      fit.n_zero_counts, fit.levels.size());
    }
    (*ctx.out) << line << "\n";
}

void run_tgamma_fit(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const DecayFit fit =
        tgamma_backexit_fit(law_from_config(cfg), direction_from_config(cfg), cfg.gamma, cfg.b,
                            cfg.L_grid, cfg.n_walks, cfg.master_seed, cfg.workers, cfg.step_cap);
    decay_outputs(ctx, "tgamma_fit", fit);
}

void run_atypical_tail(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const DecayFit fit = atypical_tail(law_from_config(cfg), direction_from_config(cfg), cfg.beta,
                                       cfg.c, cfg.zeta, cfg.L_grid, cfg.n_env, cfg.master_seed,
                                       cfg.workers, solver_from_config(cfg), cfg.gamma,
                                       cfg.path_count_constant);
    decay_outputs(ctx, "atypical_tail", fit);
}

void run_seed_check(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const DecayFit fit = seed_estimate_check(law_from_config(cfg), direction_from_config(cfg),
                                             cfg.gamma, cfg.beta0, cfg.beta, cfg.rho_coef,
                                             cfg.L_grid, cfg.n_env, cfg.master_seed, cfg.workers,
                                             solver_from_config(cfg));
    decay_outputs(ctx, "seed_check", fit);
}

void run_decompose(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    std::vector<double> betas = cfg.betas;
    if (betas.empty()) {
        const auto lr = theory::build_ladder(cfg.gamma, cfg.d, cfg.safety);
        if (lr.feasible) betas = lr.betas;
    }
    std::vector<double> ks = cfg.ks;
    if (ks.empty()) ks.assign(betas.size() + 2, 1.0);
    const BandDecomposition bd =
        decompose_rho_expectation(law_from_config(cfg), box_from_config(cfg), cfg.a, cfg.gamma,
                                  betas, ks, cfg.n_env, cfg.master_seed, cfg.workers,
                                  solver_from_config(cfg));
    std::ostringstream csv;
    write_bands_csv(bd, csv);
    ctx.write_csv("decompose.csv", csv.str());
    ctx.write_json("decompose.json", bands_to_json(bd));
    char line[160];
    std::snprintf(line, sizeof(line), "total_mean=%.17g bands=%zu n_excluded=%d", bd.total_mean,
                  bd.bands.size(), bd.n_excluded);
    (*ctx.out) << line << "\n";
}

void run_env_snapshot(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const EnvironmentLaw law = law_from_config(cfg);
    const Environment env(law, cfg.master_seed);

    if (!cfg.verify_path.empty()) {
        const EnvironmentSnapshot snap = load_environment(cfg.verify_path, cfg.d);
        std::size_t mismatches = 0;
        for (const auto& [site, kernel] : snap.kernels) {
            const SiteKernel& have = env.kernel(site);
            for (int i = 0; i < 2 * cfg.d; ++i) {
                if (have.p[i] != kernel.p[i]) {
                    ++mismatches;
                    break;
                }
            }
        }
        ctx.write_json("snapshot_verify.json", {{"file", cfg.verify_path},
                                                {"sites", snap.kernels.size()},
                                                {"mismatches", mismatches}});
        (*ctx.out) << "verified sites=" << snap.kernels.size() << " mismatches=" << mismatches
                   << "\n";
        if (mismatches > 0) throw NumericalError("snapshot does not match the configured environment");
        return;
    }

    std::vector<Site> region;
    if (!cfg.region_lo.empty() || !cfg.region_hi.empty()) {
        if (cfg.region_lo.size() != static_cast<std::size_t>(cfg.d) ||
            cfg.region_hi.size() != static_cast<std::size_t>(cfg.d)) {
            throw ValidationError("region_lo/region_hi must have d components");
        }
        Site cur{};
        for (int i = 0; i < cfg.d; ++i) {
            if (cfg.region_lo[static_cast<std::size_t>(i)] > cfg.region_hi[static_cast<std::size_t>(i)]) {
                throw ValidationError("region_lo exceeds region_hi");
            }
            cur.c[i] = static_cast<std::int32_t>(cfg.region_lo[static_cast<std::size_t>(i)]);
        }
        for (;;) {
            region.push_back(cur);
            int axis = cfg.d - 1;
            while (axis >= 0) {
                if (cur.c[axis] < cfg.region_hi[static_cast<std::size_t>(axis)]) {
                    ++cur.c[axis];
                    break;
                }
                cur.c[axis] = static_cast<std::int32_t>(cfg.region_lo[static_cast<std::size_t>(axis)]);
                --axis;
            }
            if (axis < 0) break;
        }
    } else {
        const LatticeBox box = build_box(box_from_config(cfg));
        region = box.interior;
        if (cfg.include_boundary) {
            region.insert(region.end(), box.boundary_plus.begin(), box.boundary_plus.end());
            region.insert(region.end(), box.boundary_other.begin(), box.boundary_other.end());
        }
    }
    const std::string path =
        cfg.snapshot_path.empty() ? (ctx.out_dir / "env.snapshot").string() : cfg.snapshot_path;
    save_environment(env, region, path);
    ctx.write_json("snapshot.json", {{"file", path}, {"sites", region.size()}});
    (*ctx.out) << "snapshot sites=" << region.size() << " file=" << path << "\n";
}

// Realized plan for --dry-run: grids and rules, no computation.
json dry_run_plan(const ExperimentConfig& cfg) {
    json plan;
    plan["subcommand"] = cfg.subcommand;
    if (cfg.subcommand == "effective-criterion") {
        json grid = json::array();
        const AGrid ag = a_grid_from_config(cfg);
        for (double L : cfg.L_grid) {
            if (L < cfg.c2) continue;
            grid.push_back({{"L", L},
                            {"Ltilde", cfg.ltilde_factor * L},
                            {"a_values", ag.expand(L)}});
        }
        plan["grid"] = std::move(grid);
        plan["n_env_per_point"] = cfg.n_env;
    } else if (cfg.subcommand == "tgamma-fit" || cfg.subcommand == "atypical-tail" ||
               cfg.subcommand == "seed-check") {
        plan["levels"] = cfg.L_grid;
        plan["samples_per_level"] = (cfg.subcommand == "tgamma-fit") ? cfg.n_walks
                                                                     : static_cast<long>(cfg.n_env);
    } else if (cfg.subcommand == "simulate" || cfg.subcommand == "regen") {
        plan["stop"] = cfg.stop;
        plan["walk_kind"] = cfg.walk_kind;
        plan["n_paths"] = cfg.n_paths;
    } else if (cfg.subcommand == "theory") {
        plan["op"] = cfg.theory_op;
    }
    law_from_config(cfg);  // validate law parameters even on dry runs
    return plan;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    for_each_field(cfg, [&](const char* key, const auto& value) { j[key] = value; });
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    ExperimentConfig cfg;
    Loader loader{j, {}};
    for_each_field(cfg, [&](const char* key, auto& value) { loader.field(key, value); });
    loader.finish();
    return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("out_dir");
    j.erase("workers");
    j.erase("dry_run");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_subcommand(const ExperimentConfig& cfg_in, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = cfg_in;
    if (const char* env_out = std::getenv("RWRE_OUTDIR"); env_out && *env_out) {
        cfg.out_dir = env_out;
    }
    if (const char* env_workers = std::getenv("RWRE_WORKERS"); env_workers && *env_workers) {
        cfg.workers = std::atoi(env_workers);
    }

    RunContext ctx{cfg, config_hash(cfg), fs::path(cfg.out_dir), &out};
    try {
        if (cfg.dry_run) {
            out << dry_run_plan(cfg).dump(2) << "\n";
            return 0;
        }
        fs::create_directories(ctx.out_dir);

        {
            json snap = config_to_json(cfg);
            json j;
            j["tool_version"] = kToolVersion;
            j["config_hash"] = ctx.hash;
            j["config"] = std::move(snap);
            std::ofstream f(ctx.out_dir / "config_snapshot.json", std::ios::binary);
            if (!f) throw IoError("cannot write config snapshot");
            f << j.dump(2) << "\n";
        }

        if (cfg.subcommand == "theory") {
            run_theory(ctx);
        } else if (cfg.subcommand == "quenched-exit") {
            run_quenched_exit(ctx);
        } else if (cfg.subcommand == "simulate") {
            run_simulate(ctx);
        } else if (cfg.subcommand == "regen") {
            run_regen(ctx);
        } else if (cfg.subcommand == "effective-criterion") {
            run_effective_criterion(ctx);
        } else if (cfg.subcommand == "tgamma-fit") {
            run_tgamma_fit(ctx);
        } else if (cfg.subcommand == "atypical-tail") {
            run_atypical_tail(ctx);
        } else if (cfg.subcommand == "seed-check") {
            run_seed_check(ctx);
        } else if (cfg.subcommand == "decompose") {
            run_decompose(ctx);
        } else if (cfg.subcommand == "env-snapshot") {
            run_env_snapshot(ctx);
        } else {
            throw ValidationError("unknown subcommand: " + cfg.subcommand);
        }
        ctx.log("ok");
        return 0;
    } catch (const SolverError& e) {
        err << "numerical failure: " << e.what() << " (residual " << e.residual << ")\n";
        ctx.log(std::string("numerical failure: ") + e.what());
        return 3;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        ctx.log(std::string("numerical failure: ") + e.what());
        return 3;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        ctx.log(std::string("validation error: ") + e.what());
        return 2;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        ctx.log(std::string("io error: ") + e.what());
        return 2;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace rwre
