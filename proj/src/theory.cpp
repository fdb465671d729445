#include "rwre/theory.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "rwre/errors.hpp"

namespace rwre::theory {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
}

void check_d(int d) {
    if (d < 2) throw ValidationError("dimension must be >= 2");
}

double hull_lower(double gamma) { return 1.0 / (1.0 + gamma); }

}  // namespace

double gamma_d(long long d) {
    if (d < 2) throw ValidationError("gamma_d needs d >= 2");
    const double dd = static_cast<double>(d);
    return (std::sqrt(3.0 * dd * dd - dd) - dd) / (2.0 * dd - 1.0);
}

double f_beta(double gamma, int d, double beta) {
    check_gamma(gamma);
    check_d(d);
    const double lo = hull_lower(gamma);
    if (!(beta >= lo && beta <= 1.0)) {
        throw ValidationError("beta outside the closed hull [1/(1+gamma), 1]");
    }
    return d * (beta - lo) * (1.0 + gamma) / gamma;
}

double big_F(double gamma, int d, double x) {
    check_gamma(gamma);
    check_d(d);
    return gamma + d * (x - hull_lower(gamma)) * (1.0 + gamma) / gamma;
}

std::vector<double> iterate_F(double gamma, int d, double x0, int j_max) {
    check_gamma(gamma);
    check_d(d);
    if (j_max < 0) throw ValidationError("j_max must be nonnegative");
    std::vector<double> out{x0};
    const double lo = hull_lower(gamma);
    double x = x0;
    for (int j = 0; j < j_max; ++j) {
        x = big_F(gamma, d, x);
        out.push_back(x);
        if (x > 1.0 || x < lo) break;
    }
    return out;
}

double fixed_point(double gamma, int d) {
    check_gamma(gamma);
    check_d(d);
    return (d - gamma * gamma) / ((1.0 + gamma) * d - gamma);
}

double seed_exponent(double gamma, double beta0, double beta) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0,1]");
    if (!(beta0 > 0.5 && beta0 <= beta && beta < 1.0)) {
        throw ValidationError("seed exponent needs 1/2 < beta0 <= beta < 1");
    }
    return std::min(beta + beta0 - 1.0, gamma * beta0);
}

double interpolation_f(double beta0, double f0_at_beta0, int d, double beta) {
    check_d(d);
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw ValidationError("beta0 must lie in (0,1)");
    if (!(beta >= beta0 && beta <= 1.0)) throw ValidationError("beta outside [beta0, 1]");
    return f0_at_beta0 + (beta - beta0) * (d - f0_at_beta0) / (1.0 - beta0);
}

double f_eps(double gamma, int d, double eps, double beta) {
    check_gamma(gamma);
    check_d(d);
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    const double lo = hull_lower(gamma) + eps;
    if (!(beta >= lo && beta <= 1.0)) {
        throw ValidationError("beta outside [1/(1+gamma) + eps, 1]");
    }
    const double denom = gamma - eps - gamma * eps;
    if (!(denom > 0.0)) throw ValidationError("eps too large for this gamma");
    return d * (beta - hull_lower(gamma) - eps) * (1.0 + gamma) * (1.0 - eps / d) / denom + eps;
}

LadderResult build_ladder(double gamma, int d, double safety, bool stop_on_literal_gamma) {
    check_gamma(gamma);
    check_d(d);
    if (!(safety > 0.0 && safety < 1.0)) throw ValidationError("safety must lie in (0,1)");

    LadderResult res;
    res.gamma = gamma;
    res.d = d;
    res.safety = safety;
    res.beta0 = 2.0 * gamma;
    res.lower_bound = hull_lower(gamma);
    res.x_star = fixed_point(gamma, d);

    res.iterates = iterate_F(gamma, d, stop_on_literal_gamma ? gamma : res.beta0, 64);
    for (std::size_t j = 0; j < res.iterates.size(); ++j) {
        if (res.iterates[j] > 1.0) {
            res.n_from_iterates = static_cast<int>(j);
            break;
        }
    }

    if (!(res.beta0 > res.lower_bound)) {
        res.failure_reason = "2 gamma <= 1/(1+gamma): the beta interval is empty";
        return res;
    }
    if (!(res.beta0 > res.x_star)) {
        res.failure_reason = "2 gamma <= x*: iterates do not increase past 1";
        return res;
    }

    // beta_1 is bounded by 2 gamma itself; later rungs by F of the chosen rung.
    double bound = res.beta0;
    for (int j = 1; j <= 10000; ++j) {
        const double u = std::min(bound, 1.0);
        if (!(u > res.lower_bound)) {
            res.failure_reason = "admissible interval collapsed";
            return res;
        }
        const double beta_j = u - safety * (u - res.lower_bound);
        if (!res.betas.empty() && !(beta_j > res.betas.back())) {
            res.failure_reason = "chosen betas stopped increasing";
            return res;
        }
        res.betas.push_back(beta_j);
        if (gamma + f_beta(gamma, d, beta_j) > 1.0) {
            res.n = j;
            break;
        }
        bound = big_F(gamma, d, beta_j);
    }
    if (res.n == 0) {
        res.failure_reason = "no termination within 10^4 rungs";
        return res;
    }

    // Literal checks of the ladder inequalities.
    auto push = [&](std::string line, bool ok) { res.checks.push_back({std::move(line), ok}); };
    auto num = [](double x) {
        std::ostringstream os;
        os << std::setprecision(12) << x;
        return os.str();
    };
    const double b1 = res.betas.front();
    push("1/(1+gamma) = " + num(res.lower_bound) + " < beta_1 = " + num(b1) +
             " < 2 gamma = " + num(res.beta0),
         res.lower_bound < b1 && b1 < res.beta0);
    for (std::size_t j = 1; j < res.betas.size(); ++j) {
        const double cap = gamma + f_beta(gamma, d, res.betas[j - 1]);
        push("1/(1+gamma) < beta_" + std::to_string(j + 1) + " = " + num(res.betas[j]) +
                 " < gamma + f(beta_" + std::to_string(j) + ") = " + num(cap),
             res.lower_bound < res.betas[j] && res.betas[j] < cap);
    }
    const double last = gamma + f_beta(gamma, d, res.betas.back());
    push("1 < gamma + f(beta_n) = " + num(last), last > 1.0);

    res.feasible = true;
    for (const auto& c : res.checks) res.feasible = res.feasible && c.ok;
    return res;
}

}  // namespace rwre::theory
