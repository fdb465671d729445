#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/quenched.hpp"
#include "rwre/walker.hpp"

namespace rwre {

// ---------------------------------------------------------------------------
// Data-parallel sampling kernels. Each has a plain serial reference
// implementation and an OpenMP implementation filling the same per-index
// slots; outputs are bitwise identical at any worker count.
// ---------------------------------------------------------------------------

/// Exact quenched p_plus of `region` from the origin-equivalent start index,
/// one environment per index (seed derived from seed and index). Failed
/// solves yield NaN slots.
std::vector<double> sample_p_plus_serial(const EnvironmentLaw& law, const Region& region,
                                         const ExitSystem& sys, std::int32_t start_index,
                                         int n_env, std::uint64_t seed, const SolverConfig& cfg);
std::vector<double> sample_p_plus_parallel(const EnvironmentLaw& law, const Region& region,
                                           const ExitSystem& sys, std::int32_t start_index,
                                           int n_env, std::uint64_t seed, const SolverConfig& cfg,
                                           int workers);

/// Stop reasons of annealed walks from the origin under `stop`.
std::vector<std::uint8_t> sample_outcomes_serial(const EnvironmentLaw& law, const StopRule& stop,
                                                 long n_walks, std::uint64_t seed);
std::vector<std::uint8_t> sample_outcomes_parallel(const EnvironmentLaw& law, const StopRule& stop,
                                                   long n_walks, std::uint64_t seed, int workers);

/// X_{beta0,L} statistics, one environment per index; NaN on solver failure.
std::vector<double> sample_x_stat_serial(const EnvironmentLaw& law, const RenormBoxes& rb,
                                         int n_env, std::uint64_t seed, const SolverConfig& cfg);
std::vector<double> sample_x_stat_parallel(const EnvironmentLaw& law, const RenormBoxes& rb,
                                           int n_env, std::uint64_t seed, const SolverConfig& cfg,
                                           int workers);

// ---------------------------------------------------------------------------
// Spec operations
// ---------------------------------------------------------------------------

struct MomentEstimate {
    BoxSpec spec;
    double a = 0.0;
    int n_env = 0;
    double mean = 0.0;
    double ci_half_width = 0.0;  // 95%, normal approximation
    int n_excluded = 0;
    std::vector<double> sample_log_rhos;  // retained when requested
};

/// E[rho_B^a] over n_env sampled environments; rho computed exactly per
/// environment, rho^a accumulated in the log domain.
MomentEstimate estimate_rho_moment(const EnvironmentLaw& law, const BoxSpec& spec, double a,
                                   int n_env, std::uint64_t seed, int workers = 0,
                                   const SolverConfig& cfg = {}, bool keep_samples = false);

enum class Verdict { satisfied, not_satisfied_at_this_scale };

const char* verdict_name(Verdict v);

struct AGrid {
    std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};  // a = L^-alpha
    bool include_zero = true;
    bool include_one = true;

    std::vector<double> expand(double L) const;
};

struct CriterionEntry {
    double L = 0.0;
    double Ltilde = 0.0;
    double a = 0.0;
    double prefactor = 0.0;
    double product = 0.0;
    MomentEstimate moment;
};

struct CriterionReport {
    Direction l;
    double kappa = 0.0;
    double c1 = 1.0;
    double c2 = 5.0;
    int n_env = 0;
    std::uint64_t seed = 0;
    std::vector<CriterionEntry> entries;
    double inf_product = 0.0;
    std::size_t argmin = 0;
    Verdict verdict = Verdict::not_satisfied_at_this_scale;
};

/// Effective-criterion scan over a grid of scales L and moment powers a; the
/// boxes are (R, L-2, L+2, Ltilde) with Ltilde = ltilde_factor * L capped
/// into [3 sqrt(d), L^3). Grid points violating L >= c2 are dropped.
CriterionReport effective_criterion(const EnvironmentLaw& law, const Direction& l,
                                    const std::vector<double>& L_grid, double ltilde_factor,
                                    const AGrid& a_grid, double c1, double c2, int n_env,
                                    std::uint64_t seed, int workers = 0,
                                    const SolverConfig& cfg = {});

struct DecayFit {
    double exponent = 0.0;        // fit abscissa is L^exponent
    std::vector<double> levels;   // L grid, increasing
    std::vector<long> counts;     // observed events per level
    std::vector<long> n_eff;      // usable samples per level
    std::vector<double> freqs;
    std::vector<double> log_freqs;  // NaN at zero-count levels
    int n_zero_counts = 0;
    bool fit_available = false;
    double slope = 0.0;      // delta in log p ~ intercept - delta * L^exponent
    double slope_ci = 0.0;   // 95% half-width
    double intercept = 0.0;
    // atypical-tail extras
    std::vector<double> thresholds;         // e^{-c L^beta} per level
    std::vector<double> ellipticity_floors; // kappa^{c(d) L} per level
    double zeta_admissible_bound = 0.0;     // f(beta) when gamma was supplied, else NaN
};

/// Back-exit decay of slabs U_{l',b,L}: annealed Monte Carlo per level, then
/// least squares of log frequency against L^gamma over levels with events.
DecayFit tgamma_backexit_fit(const EnvironmentLaw& law, const Direction& l_prime, double gamma,
                             double b, const std::vector<double>& L_grid, long n_walks,
                             std::uint64_t seed, int workers = 0, long step_cap = 100000000);

/// Frequency of atypically small quenched exit probabilities,
/// P(p_plus <= e^{-c L^beta}), over the 3L-transverse criterion boxes; fitted
/// against L^zeta. `gamma_for_bound` (optional, NaN to skip) reports the
/// admissible-zeta bound f(beta).
DecayFit atypical_tail(const EnvironmentLaw& law, const Direction& vhat, double beta, double c,
                       double zeta, const std::vector<double>& L_grid, int n_env,
                       std::uint64_t seed, int workers = 0, const SolverConfig& cfg = {},
                       double gamma_for_bound = std::numeric_limits<double>::quiet_NaN(),
                       double path_count_constant = 4.0);

struct Band {
    std::string label;   // "(I)", "(II)", "(III_1)", ..., "below_floor"
    double upper = 0.0;  // p_plus band (lower, upper]
    double lower = 0.0;
    double partial_sum = 0.0;  // contribution to E[rho^a]
    long count = 0;
};

struct BandDecomposition {
    double gamma = 0.0;
    double a = 0.0;
    double L = 0.0;
    std::vector<double> ks;     // k_0 .. k_{n+1}
    std::vector<double> betas;  // beta_1 .. beta_n (beta_{n+1} = 1 implied)
    std::vector<Band> bands;
    double total_mean = 0.0;  // direct mean of rho^a over the sample
    int n_env = 0;
    int n_excluded = 0;
};

/// Splits E[rho^a] by the exact p_plus of each sampled environment into the
/// bands (I), (II), (III_j) with thresholds e^{-k_0 L^gamma} and
/// e^{-k_j L^{beta_j}}; samples below the last threshold land in an overflow
/// band so the partition is conservative.
BandDecomposition decompose_rho_expectation(const EnvironmentLaw& law, const BoxSpec& spec,
                                            double a, double gamma,
                                            const std::vector<double>& betas,
                                            const std::vector<double>& ks, int n_env,
                                            std::uint64_t seed, int workers = 0,
                                            const SolverConfig& cfg = {});

/// Scaling check of the seed estimate: frequencies of
/// {X_{beta0,L} >= rho_coef L^beta} fitted against L^{(beta+beta0-1) ^ gamma beta0}.
DecayFit seed_estimate_check(const EnvironmentLaw& law, const Direction& vhat, double gamma,
                             double beta0, double beta, double rho_coef,
                             const std::vector<double>& L_grid, int n_env, std::uint64_t seed,
                             int workers = 0, const SolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Report emission (data part only; provenance headers are the runner's job)
// ---------------------------------------------------------------------------

void write_criterion_csv(const CriterionReport& report, std::ostream& out);
void write_decay_csv(const DecayFit& fit, std::ostream& out);
void write_decay_gnuplot(const DecayFit& fit, std::ostream& out);
void write_bands_csv(const BandDecomposition& bands, std::ostream& out);

}  // namespace rwre
