#pragma once

#include <string>
#include <vector>

namespace rwre::theory {

/// gamma_d = (sqrt(3d^2 - d) - d) / (2d - 1), d >= 2.
double gamma_d(long long d);

/// f(beta) = d (beta - 1/(1+gamma)) (1+gamma)/gamma on the closed hull
/// [1/(1+gamma), 1]; outside it throws.
double f_beta(double gamma, int d, double beta);

/// F(x) = gamma + f(x), evaluated by the affine formula everywhere (the map
/// is affine, so iteration diagnostics can leave the hull).
double big_F(double gamma, int d, double x);

/// Iterates x0, F(x0), F(F(x0)), ...; stops after the first value that leaves
/// the hull or exceeds 1, or after j_max applications.
std::vector<double> iterate_F(double gamma, int d, double x0, int j_max);

/// Unstable fixed point x* = (d - gamma^2) / ((1+gamma) d - gamma).
double fixed_point(double gamma, int d);

/// min(beta + beta0 - 1, gamma * beta0) for 1/2 < beta0 <= beta < 1.
double seed_exponent(double gamma, double beta0, double beta);

/// Linear interpolation between (beta0, f0_at_beta0) and (1, d).
double interpolation_f(double beta0, double f0_at_beta0, int d, double beta);

/// f_eps(beta) = d (beta - 1/(1+gamma) - eps) (1+gamma)(1 - eps/d)/(gamma - eps - gamma eps) + eps.
double f_eps(double gamma, int d, double eps, double beta);

struct LadderCheck {
    std::string line;
    bool ok = false;
};

struct LadderResult {
    double gamma = 0.0;
    int d = 0;
    double safety = 0.0;
    double beta0 = 0.0;          // 2 gamma
    double lower_bound = 0.0;    // 1/(1+gamma)
    double x_star = 0.0;
    std::vector<double> betas;   // beta_1 .. beta_n
    int n = 0;
    std::vector<double> iterates;  // F^(j)(2 gamma), j = 0,1,...
    int n_from_iterates = 0;       // first j with the iterate above 1 (0 if none)
    bool feasible = false;
    std::vector<LadderCheck> checks;
    std::string failure_reason;
};

/// Builds the beta ladder for (gamma, d): beta_0 = 2 gamma, each rung backed
/// off from its open upper endpoint by `safety` of the interval width,
/// stopping at the first rung with gamma + f(beta_j) > 1. When
/// `stop_on_literal_gamma` is set, n_from_iterates counts iterates of gamma
/// instead of 2 gamma.
LadderResult build_ladder(double gamma, int d, double safety = 0.01,
                          bool stop_on_literal_gamma = false);

}  // namespace rwre::theory
