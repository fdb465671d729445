#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

struct SolverConfig {
    enum class Mode { sweeps, dense };
    double tolerance = 1e-12;  // max-norm residual
    long max_sweeps = 1000000;
    Mode mode = Mode::sweeps;
};

/// Topology of an exit problem, precomputed once per region and shared across
/// environments: per interior site, the 2d neighbor codes (>= 0 interior
/// index, otherwise ~code is a boundary index).
struct ExitSystem {
    int d = 0;
    std::int32_t n_interior = 0;
    std::int32_t n_boundary = 0;
    std::vector<std::int32_t> nbr;            // n_interior * 2d
    std::vector<std::uint8_t> target;         // per boundary site

    static ExitSystem build(const Region& region);
};

/// Interior kernels realized row-per-site (2d entries each), in interior order.
std::vector<double> realize_kernels(const EnvironmentLaw& law, const Region& region,
                                    std::uint64_t seed);
std::vector<double> realize_kernels(const Environment& env, const Region& region);

struct SolveResult {
    std::vector<double> values;  // per interior site
    double residual = 0.0;
    long sweeps = 0;
};

/// Forward system h(x) = sum_e w(x,e) h(x+e) with boundary data = target
/// indicator; h(x) is the probability of exiting through the target set.
SolveResult solve_hitting(const ExitSystem& sys, const std::vector<double>& kernels,
                          const SolverConfig& cfg);

/// Adjoint system: expected visit counts G(x) before exit, started from
/// interior index `start`.
SolveResult solve_occupation(const ExitSystem& sys, const std::vector<double>& kernels,
                             std::int32_t start, const SolverConfig& cfg);

/// One-step push of an occupation measure to the boundary exit distribution.
std::vector<double> boundary_push(const ExitSystem& sys, const std::vector<double>& kernels,
                                  const std::vector<double>& occupation);

struct ExitProblem {
    const Environment* environment = nullptr;
    const LatticeBox* box = nullptr;
    Site start;
};

struct ExitDistribution {
    std::vector<std::pair<Site, double>> probs;  // boundary sites, lexicographic
    double p_plus = 0.0;
    double rho = 0.0;
    double solver_residual = 0.0;
};

/// Full quenched exit law from one adjoint solve; validates that the
/// distribution sums to 1 within 1e-9.
ExitDistribution exit_distribution(const ExitProblem& problem, const SolverConfig& cfg = {});

double p_plus(const Environment& env, const BoxSpec& spec, const Site& start,
              const SolverConfig& cfg = {});
double rho(const Environment& env, const BoxSpec& spec, const SolverConfig& cfg = {});

/// Smallest target-exit probability over the given start sites (one hitting
/// solve serves every start). Starts must be interior sites of the region.
double target_exit_infimum(const Region& region, const ExitSystem& sys,
                           const std::vector<double>& kernels,
                           const std::vector<Site>& starts, const SolverConfig& cfg);

/// X_{beta,L}(w) = -log inf_{x in B1} P_x(exit B2 through the star boundary).
double x_stat(const Environment& env, const RenormBoxes& rb, const SolverConfig& cfg = {});

/// Bad tile: inf_{x in B~1} P_x(exit B~2 through its plus boundary) < 1/2.
bool is_bad(const Environment& env, const TileBoxes& tb, const SolverConfig& cfg = {});

}  // namespace rwre
