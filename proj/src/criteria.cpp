#include "rwre/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"
#include "rwre/theory.hpp"

namespace rwre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_rho_from_p(double p) {
    return std::log1p(-p) - std::log(p);
}

double p_plus_body(const EnvironmentLaw& law, const Region& region, const ExitSystem& sys,
                   std::int32_t start_index, std::uint64_t seed, const SolverConfig& cfg,
                   std::size_t index) {
    try {
        const std::vector<double> kernels = realize_kernels(law, region, seed_for_index(seed, index));
        const SolveResult sol = solve_hitting(sys, kernels, cfg);
        return sol.values[static_cast<std::size_t>(start_index)];
    } catch (const std::exception&) {
        return kNaN;
    }
}

double x_stat_body(const EnvironmentLaw& law, const RenormBoxes& rb, const ExitSystem& sys,
                   const std::vector<std::int32_t>& b1_indices, std::uint64_t seed,
                   const SolverConfig& cfg, std::size_t index) {
    try {
        const std::vector<double> kernels = realize_kernels(law, rb.b2, seed_for_index(seed, index));
        const SolveResult sol = solve_hitting(sys, kernels, cfg);
        double min_p = 1.0;
        for (std::int32_t i : b1_indices) min_p = std::min(min_p, sol.values[static_cast<std::size_t>(i)]);
        if (!(min_p >= 1e-300)) return kNaN;
        return -std::log(min_p);
    } catch (const std::exception&) {
        return kNaN;
    }
}

std::vector<std::int32_t> b1_interior_indices(const RenormBoxes& rb) {
    std::vector<std::int32_t> out;
    out.reserve(rb.b1.size());
    for (const Site& s : rb.b1) {
        auto it = rb.b2.interior_index.find(s);
        if (it == rb.b2.interior_index.end()) {
            throw ValidationError("renorm box B1 is not contained in B2");
        }
        out.push_back(it->second);
    }
    return out;
}

std::int32_t origin_index(const Region& region) {
    auto it = region.interior_index.find(Site::origin());
    if (it == region.interior_index.end()) {
        throw ValidationError("origin is not interior to the box");
    }
    return it->second;
}

struct PPlusSamples {
    Region region;
    ExitSystem sys;
    std::vector<double> values;  // NaN marks an excluded environment
};

PPlusSamples collect_p_plus(const EnvironmentLaw& law, const BoxSpec& spec, int n_env,
                            std::uint64_t seed, int workers, const SolverConfig& cfg) {
    if (n_env < 1) throw ValidationError("n_env must be >= 1");
    const LatticeBox box = build_box(spec, /*require_origin=*/true);
    PPlusSamples out;
    out.region = as_region(box);
    out.sys = ExitSystem::build(out.region);
    const std::int32_t start = origin_index(out.region);
    out.values = sample_p_plus_parallel(law, out.region, out.sys, start, n_env, seed, cfg, workers);
    return out;
}

// rho^a samples with exclusion accounting; throws past 1% exclusions.
struct PowSamples {
    std::vector<double> values;
    std::vector<double> log_rhos;
    int n_excluded = 0;
};

PowSamples rho_pow_samples(const std::vector<double>& p_values, double a) {
    PowSamples out;
    out.values.reserve(p_values.size());
    out.log_rhos.reserve(p_values.size());
    for (double p : p_values) {
        if (std::isnan(p)) {
            ++out.n_excluded;
            continue;
        }
        const double lr = log_rho_from_p(p);
        out.log_rhos.push_back(lr);
        out.values.push_back(std::exp(a * lr));
    }
    if (out.values.empty() ||
        out.n_excluded > 0.01 * static_cast<double>(p_values.size())) {
        throw NumericalError("more than 1% of environment solves failed");
    }
    return out;
}

struct LevelCounts {
    std::vector<long> counts;
    std::vector<long> n_eff;
};

DecayFit assemble_decay_fit(double exponent, const std::vector<double>& levels,
                            const LevelCounts& lc) {
    DecayFit fit;
    fit.exponent = exponent;
    fit.levels = levels;
    fit.counts = lc.counts;
    fit.n_eff = lc.n_eff;
    fit.zeta_admissible_bound = kNaN;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const long n = lc.n_eff[i];
        const long k = lc.counts[i];
        const double freq = (n > 0) ? static_cast<double>(k) / static_cast<double>(n) : kNaN;
        fit.freqs.push_back(freq);
        if (k > 0 && n > 0) {
            fit.log_freqs.push_back(std::log(freq));
            xs.push_back(std::pow(levels[i], exponent));
            ys.push_back(std::log(freq));
        } else {
            fit.log_freqs.push_back(kNaN);
            ++fit.n_zero_counts;
        }
    }
    const LineFit lf = fit_line(xs, ys);
    if (lf.available) {
        fit.fit_available = true;
        fit.slope = -lf.slope;  // log p ~ intercept - slope * L^exponent
        fit.intercept = lf.intercept;
        fit.slope_ci = 1.959963984540054 * lf.slope_se;
    }
    return fit;
}

std::vector<double> checked_levels(std::vector<double> L_grid) {
    if (L_grid.empty()) throw ValidationError("level grid is empty");
    std::sort(L_grid.begin(), L_grid.end());
    L_grid.erase(std::unique(L_grid.begin(), L_grid.end()), L_grid.end());
    for (double L : L_grid) {
        if (!(L > 0.0)) throw ValidationError("levels must be positive");
    }
    return L_grid;
}

void fprint17(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sampling kernels
// ---------------------------------------------------------------------------

std::vector<double> sample_p_plus_serial(const EnvironmentLaw& law, const Region& region,
                                         const ExitSystem& sys, std::int32_t start_index,
                                         int n_env, std::uint64_t seed, const SolverConfig& cfg) {
    std::vector<double> out(static_cast<std::size_t>(n_env));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = p_plus_body(law, region, sys, start_index, seed, cfg, i);
    }
    return out;
}

std::vector<double> sample_p_plus_parallel(const EnvironmentLaw& law, const Region& region,
                                           const ExitSystem& sys, std::int32_t start_index,
                                           int n_env, std::uint64_t seed, const SolverConfig& cfg,
                                           int workers) {
    std::vector<double> out(static_cast<std::size_t>(n_env));
    parallel_for(out.size(), workers, [&](std::size_t i) {
        out[i] = p_plus_body(law, region, sys, start_index, seed, cfg, i);
    });
    return out;
}

std::vector<std::uint8_t> sample_outcomes_serial(const EnvironmentLaw& law, const StopRule& stop,
                                                 long n_walks, std::uint64_t seed) {
    if (n_walks < 1) throw ValidationError("n_walks must be >= 1");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n_walks));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(
            annealed_outcome(law, Site::origin(), stop, seed_for_index(seed, i)));
    }
    return out;
}

std::vector<std::uint8_t> sample_outcomes_parallel(const EnvironmentLaw& law, const StopRule& stop,
                                                   long n_walks, std::uint64_t seed, int workers) {
    if (n_walks < 1) throw ValidationError("n_walks must be >= 1");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n_walks));
    parallel_for(out.size(), workers, [&](std::size_t i) {
        out[i] = static_cast<std::uint8_t>(
            annealed_outcome(law, Site::origin(), stop, seed_for_index(seed, i)));
    });
    return out;
}

std::vector<double> sample_x_stat_serial(const EnvironmentLaw& law, const RenormBoxes& rb,
                                         int n_env, std::uint64_t seed, const SolverConfig& cfg) {
    const ExitSystem sys = ExitSystem::build(rb.b2);
    const std::vector<std::int32_t> idx = b1_interior_indices(rb);
    std::vector<double> out(static_cast<std::size_t>(n_env));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = x_stat_body(law, rb, sys, idx, seed, cfg, i);
    }
    return out;
}

std::vector<double> sample_x_stat_parallel(const EnvironmentLaw& law, const RenormBoxes& rb,
                                           int n_env, std::uint64_t seed, const SolverConfig& cfg,
                                           int workers) {
    const ExitSystem sys = ExitSystem::build(rb.b2);
    const std::vector<std::int32_t> idx = b1_interior_indices(rb);
    std::vector<double> out(static_cast<std::size_t>(n_env));
    parallel_for(out.size(), workers, [&](std::size_t i) {
        out[i] = x_stat_body(law, rb, sys, idx, seed, cfg, i);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Spec operations
// ---------------------------------------------------------------------------

MomentEstimate estimate_rho_moment(const EnvironmentLaw& law, const BoxSpec& spec, double a,
                                   int n_env, std::uint64_t seed, int workers,
                                   const SolverConfig& cfg, bool keep_samples) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("moment power a must lie in [0,1]");
    const PPlusSamples samples = collect_p_plus(law, spec, n_env, seed, workers, cfg);
    PowSamples pow = rho_pow_samples(samples.values, a);
    const MeanCi mc = mean_ci(pow.values);

    MomentEstimate est;
    est.spec = spec;
    est.a = a;
    est.n_env = n_env;
    est.mean = mc.mean;
    est.ci_half_width = mc.ci_half_width;
    est.n_excluded = pow.n_excluded;
    if (keep_samples) est.sample_log_rhos = std::move(pow.log_rhos);
    return est;
}

const char* verdict_name(Verdict v) {
    return v == Verdict::satisfied ? "satisfied" : "not_satisfied_at_this_scale";
}

std::vector<double> AGrid::expand(double L) const {
    std::set<double> vals;
    if (include_zero) vals.insert(0.0);
    if (include_one) vals.insert(1.0);
    for (double alpha : alphas) {
        if (!(alpha > 0.0)) throw ValidationError("a-grid exponents must be positive");
        vals.insert(std::pow(L, -alpha));
    }
    return std::vector<double>(vals.begin(), vals.end());
}

CriterionReport effective_criterion(const EnvironmentLaw& law, const Direction& l,
                                    const std::vector<double>& L_grid, double ltilde_factor,
                                    const AGrid& a_grid, double c1, double c2, int n_env,
                                    std::uint64_t seed, int workers, const SolverConfig& cfg) {
    if (law.dim() != l.d) throw ValidationError("law/direction dimension mismatch");
    if (!(c1 > 0.0)) throw ValidationError("c1 must be positive");
    if (n_env < 1) throw ValidationError("n_env must be >= 1");
    const int d = law.dim();
    const Rotation rot = rotation_from_direction(l);

    CriterionReport report;
    report.l = l;
    report.kappa = law.kappa();
    report.c1 = c1;
    report.c2 = c2;
    report.n_env = n_env;
    report.seed = seed;

    const double log_inv_kappa = std::log(1.0 / law.kappa());
    std::size_t level_index = 0;
    for (double L : checked_levels(L_grid)) {
        if (L < c2) continue;
        const double Ltilde = ltilde_factor * L;
        BoxSpec spec = BoxSpec::criterion(rot, L, Ltilde);
        try {
            validate_criterion_spec(spec, c2);
        } catch (const ValidationError&) {
            continue;
        }
        // One batch of environments per scale, shared across the a-grid.
        const PPlusSamples samples =
            collect_p_plus(law, spec, n_env, hash_combine(seed, level_index), workers, cfg);
        ++level_index;
        const double prefactor = c1 * std::pow(log_inv_kappa, 3.0 * (d - 1)) *
                                 std::pow(Ltilde, d - 1) * std::pow(L, 3.0 * (d - 1) + 1.0);
        for (double a : a_grid.expand(L)) {
            PowSamples pow = rho_pow_samples(samples.values, a);
            const MeanCi mc = mean_ci(pow.values);
            CriterionEntry entry;
            entry.L = L;
            entry.Ltilde = Ltilde;
            entry.a = a;
            entry.prefactor = prefactor;
            entry.product = prefactor * mc.mean;
            entry.moment.spec = spec;
            entry.moment.a = a;
            entry.moment.n_env = n_env;
            entry.moment.mean = mc.mean;
            entry.moment.ci_half_width = mc.ci_half_width;
            entry.moment.n_excluded = pow.n_excluded;
            report.entries.push_back(std::move(entry));
        }
    }
    if (report.entries.empty()) {
        throw ValidationError("criterion grid is empty after constraint filtering");
    }

    report.argmin = 0;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        if (report.entries[i].product < report.entries[report.argmin].product) report.argmin = i;
    }
    const CriterionEntry& best = report.entries[report.argmin];
    report.inf_product = best.product;
    report.verdict = (best.product + best.prefactor * best.moment.ci_half_width < 1.0)
                         ? Verdict::satisfied
                         : Verdict::not_satisfied_at_this_scale;
    return report;
}

DecayFit tgamma_backexit_fit(const EnvironmentLaw& law, const Direction& l_prime, double gamma,
                             double b, const std::vector<double>& L_grid, long n_walks,
                             std::uint64_t seed, int workers, long step_cap) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0,1]");
    if (!(b > 0.0)) throw ValidationError("slab parameter b must be positive");
    if (n_walks < 1) throw ValidationError("n_walks must be >= 1");
    if (law.dim() != l_prime.d) throw ValidationError("law/direction dimension mismatch");

    const std::vector<double> levels = checked_levels(L_grid);
    LevelCounts lc;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        StopRule stop = StopRule::slab(Slab(l_prime, b, levels[li]));
        stop.step_cap = step_cap;
        const std::vector<std::uint8_t> outcomes =
            sample_outcomes_parallel(law, stop, n_walks, hash_combine(seed, li), workers);
        long back = 0, capped = 0;
        for (std::uint8_t o : outcomes) {
            if (o == static_cast<std::uint8_t>(StopReason::slab_back)) ++back;
            if (o == static_cast<std::uint8_t>(StopReason::step_cap)) ++capped;
        }
        lc.counts.push_back(back);
        lc.n_eff.push_back(n_walks - capped);
    }
    return assemble_decay_fit(gamma, levels, lc);
}

DecayFit atypical_tail(const EnvironmentLaw& law, const Direction& vhat, double beta, double c,
                       double zeta, const std::vector<double>& L_grid, int n_env,
                       std::uint64_t seed, int workers, const SolverConfig& cfg,
                       double gamma_for_bound, double path_count_constant) {
    if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0,1)");
    if (!(c > 0.0)) throw ValidationError("threshold constant c must be positive");
    if (!(zeta > 0.0)) throw ValidationError("zeta must be positive");
    if (law.dim() != vhat.d) throw ValidationError("law/direction dimension mismatch");

    const Rotation rot = rotation_from_direction(vhat);
    const std::vector<double> levels = checked_levels(L_grid);
    LevelCounts lc;
    std::vector<double> thresholds, floors;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double L = levels[li];
        const BoxSpec spec = BoxSpec::criterion(rot, L, 3.0 * L);
        const PPlusSamples samples =
            collect_p_plus(law, spec, n_env, hash_combine(seed, li), workers, cfg);
        const double threshold = std::exp(-c * std::pow(L, beta));
        thresholds.push_back(threshold);
        floors.push_back(std::pow(law.kappa(), path_count_constant * L));
        long hits = 0, excluded = 0;
        for (double p : samples.values) {
            if (std::isnan(p)) {
                ++excluded;
            } else if (p <= threshold) {
                ++hits;
            }
        }
        lc.counts.push_back(hits);
        lc.n_eff.push_back(n_env - excluded);
    }
    DecayFit fit = assemble_decay_fit(zeta, levels, lc);
    fit.thresholds = std::move(thresholds);
    fit.ellipticity_floors = std::move(floors);
    if (!std::isnan(gamma_for_bound)) {
        const double lo = 1.0 / (1.0 + gamma_for_bound);
        fit.zeta_admissible_bound =
            (beta > lo && beta < 1.0) ? theory::f_beta(gamma_for_bound, law.dim(), beta) : kNaN;
    }
    return fit;
}

BandDecomposition decompose_rho_expectation(const EnvironmentLaw& law, const BoxSpec& spec,
                                            double a, double gamma,
                                            const std::vector<double>& betas,
                                            const std::vector<double>& ks, int n_env,
                                            std::uint64_t seed, int workers,
                                            const SolverConfig& cfg) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("moment power a must lie in [0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
    if (ks.size() != betas.size() + 2) {
        throw ValidationError("need k_0 .. k_{n+1}: ks must have betas.size() + 2 entries");
    }
    for (double k : ks) {
        if (!(k > 0.0)) throw ValidationError("band constants k_j must be positive");
    }
    for (std::size_t j = 0; j + 1 < betas.size(); ++j) {
        if (!(betas[j] < betas[j + 1])) throw ValidationError("betas must increase strictly");
    }
    for (double bj : betas) {
        if (!(bj > 0.0 && bj < 1.0)) throw ValidationError("betas must lie in (0,1)");
    }

    BandDecomposition out;
    out.gamma = gamma;
    out.a = a;
    out.L = spec.scale();
    out.ks = ks;
    out.betas = betas;
    out.n_env = n_env;

    const std::size_t n_bands = betas.size() + 2;  // (I),(II),(III_1..n-?) see labels below
    // thresholds t_0 = e^{-k_0 L^gamma}, t_j = e^{-k_j L^{beta_j}}, t_{n+1} = e^{-k_{n+1} L}
    std::vector<double> t;
    t.push_back(std::exp(-ks[0] * std::pow(out.L, gamma)));
    for (std::size_t j = 0; j < betas.size(); ++j) {
        t.push_back(std::exp(-ks[j + 1] * std::pow(out.L, betas[j])));
    }
    t.push_back(std::exp(-ks.back() * out.L));
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        if (!(t[j] > t[j + 1])) {
            throw ValidationError("band boundaries are non-monotone at this scale");
        }
    }

    const PPlusSamples samples = collect_p_plus(law, spec, n_env, seed, workers, cfg);

    // Bands: (I): p > t0; (II): t1 < p <= t0; (III_j): t_{j+1} < p <= t_j; overflow below.
    std::vector<std::vector<double>> members(n_bands + 1);
    std::vector<double> all_values;
    int excluded = 0;
    for (double p : samples.values) {
        if (std::isnan(p)) {
            ++excluded;
            continue;
        }
        const double v = std::exp(a * log_rho_from_p(p));
        all_values.push_back(v);
        std::size_t band = n_bands;  // overflow unless matched
        if (p > t[0]) {
            band = 0;
        } else {
            for (std::size_t j = 0; j + 1 < t.size(); ++j) {
                if (p > t[j + 1] && p <= t[j]) {
                    band = j + 1;
                    break;
                }
            }
        }
        members[band].push_back(v);
    }
    if (all_values.empty() || excluded > 0.01 * static_cast<double>(n_env)) {
        throw NumericalError("more than 1% of environment solves failed");
    }
    out.n_excluded = excluded;
    out.total_mean = pairwise_sum(all_values) / static_cast<double>(all_values.size());

    const double inv_n = 1.0 / static_cast<double>(all_values.size());
    for (std::size_t bidx = 0; bidx <= n_bands; ++bidx) {
        Band band;
        if (bidx == 0) {
            band.label = "(I)";
            band.upper = 1.0;
            band.lower = t[0];
        } else if (bidx == 1) {
            band.label = "(II)";
            band.upper = t[0];
            band.lower = t[1];
        } else if (bidx < n_bands) {
            band.label = "(III_" + std::to_string(bidx - 1) + ")";
            band.upper = t[bidx - 1];
            band.lower = t[bidx];
        } else {
            band.label = "below_floor";
            band.upper = t.back();
            band.lower = 0.0;
        }
        band.count = static_cast<long>(members[bidx].size());
        band.partial_sum = pairwise_sum(members[bidx]) * inv_n;
        out.bands.push_back(std::move(band));
    }
    return out;
}

DecayFit seed_estimate_check(const EnvironmentLaw& law, const Direction& vhat, double gamma,
                             double beta0, double beta, double rho_coef,
                             const std::vector<double>& L_grid, int n_env, std::uint64_t seed,
                             int workers, const SolverConfig& cfg) {
    const double exponent = theory::seed_exponent(gamma, beta0, beta);  // validates domains
    if (!(rho_coef > 0.0)) throw ValidationError("rho_coef must be positive");
    if (n_env < 1) throw ValidationError("n_env must be >= 1");
    if (law.dim() != vhat.d) throw ValidationError("law/direction dimension mismatch");

    const std::vector<double> levels = checked_levels(L_grid);
    LevelCounts lc;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double L = levels[li];
        const RenormBoxes rb = build_renorm_boxes(vhat, beta0, L, Site::origin());
        const std::vector<double> xs =
            sample_x_stat_parallel(law, rb, n_env, hash_combine(seed, li), cfg, workers);
        const double threshold = rho_coef * std::pow(L, beta);
        long hits = 0, excluded = 0;
        for (double x : xs) {
            if (std::isnan(x)) {
                ++excluded;
            } else if (x >= threshold) {
                ++hits;
            }
        }
        lc.counts.push_back(hits);
        lc.n_eff.push_back(n_env - excluded);
    }
    DecayFit fit = assemble_decay_fit(exponent, levels, lc);
    // Degenerate threshold: every sample exceeds it at every level.
    bool all_full = true;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        all_full = all_full && lc.n_eff[i] > 0 && lc.counts[i] == lc.n_eff[i];
    }
    if (all_full) fit.fit_available = false;
    return fit;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

void write_criterion_csv(const CriterionReport& report, std::ostream& out) {
    out << "L,Ltilde,a,mean,ci,prefactor,product\n";
    for (const CriterionEntry& e : report.entries) {
        fprint17(out, e.L);
        out << ',';
        fprint17(out, e.Ltilde);
        out << ',';
        fprint17(out, e.a);
        out << ',';
        fprint17(out, e.moment.mean);
        out << ',';
        fprint17(out, e.moment.ci_half_width);
        out << ',';
        fprint17(out, e.prefactor);
        out << ',';
        fprint17(out, e.product);
        out << '\n';
    }
    out << "# inf_product = ";
    fprint17(out, report.inf_product);
    out << " at L=";
    fprint17(out, report.entries[report.argmin].L);
    out << " a=";
    fprint17(out, report.entries[report.argmin].a);
    out << " verdict=" << verdict_name(report.verdict) << '\n';
}

void write_decay_csv(const DecayFit& fit, std::ostream& out) {
    out << "L,count,n,freq,log_freq\n";
    for (std::size_t i = 0; i < fit.levels.size(); ++i) {
        fprint17(out, fit.levels[i]);
        out << ',' << fit.counts[i] << ',' << fit.n_eff[i] << ',';
        fprint17(out, fit.freqs[i]);
        out << ',';
        fprint17(out, fit.log_freqs[i]);
        out << '\n';
    }
    out << "# fit: exponent=";
    fprint17(out, fit.exponent);
    if (fit.fit_available) {
        out << " delta=";
        fprint17(out, fit.slope);
        out << " delta_ci95=";
        fprint17(out, fit.slope_ci);
        out << " intercept=";
        fprint17(out, fit.intercept);
    } else {
        out << " unavailable";
    }
    out << " zero_count_levels=" << fit.n_zero_counts << '\n';
}

void write_decay_gnuplot(const DecayFit& fit, std::ostream& out) {
    // Two columns: L and log frequency. Zero-count levels show the 3/n upper
    // bound, marked in a comment; the bound never enters the fit.
    out << "# L log_freq (zero-count levels plotted at log(3/n))\n";
    for (std::size_t i = 0; i < fit.levels.size(); ++i) {
        double y = fit.log_freqs[i];
        if (std::isnan(y)) {
            if (fit.n_eff[i] <= 0) continue;
            y = std::log(3.0 / static_cast<double>(fit.n_eff[i]));
        }
        fprint17(out, fit.levels[i]);
        out << ' ';
        fprint17(out, y);
        out << '\n';
    }
}

void write_bands_csv(const BandDecomposition& bands, std::ostream& out) {
    out << "band,lower,upper,count,partial_sum\n";
    for (const Band& b : bands.bands) {
        out << b.label << ',';
        fprint17(out, b.lower);
        out << ',';
        fprint17(out, b.upper);
        out << ',' << b.count << ',';
        fprint17(out, b.partial_sum);
        out << '\n';
    }
    out << "# total_mean = ";
    fprint17(out, bands.total_mean);
    out << '\n';
}

}  // namespace rwre
