#include "rwre/quenched.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

constexpr double kProbFloor = 1e-300;

// Smallest probabilities the solver may report before we treat them as
// underflow rather than signal.
void check_prob_floor(double p, const char* what) {
    if (!(p >= kProbFloor)) {
        throw NumericalError(std::string(what) + " underflowed the 1e-300 probability floor");
    }
}

struct DenseSolves {
    // (I - Q) h = r for the forward system, (I - Q^T) g = e_start for the adjoint.
    static std::vector<double> forward(const ExitSystem& sys, const std::vector<double>& kernels) {
        const int n = sys.n_interior;
        const int m = 2 * sys.d;
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) {
                const std::int32_t code = sys.nbr[static_cast<std::size_t>(i) * m + k];
                const double w = kernels[static_cast<std::size_t>(i) * m + k];
                if (code >= 0) {
                    a(i, code) -= w;
                } else if (sys.target[static_cast<std::size_t>(~code)]) {
                    r(i) += w;
                }
            }
        }
        const Eigen::VectorXd h = a.partialPivLu().solve(r);
        return std::vector<double>(h.data(), h.data() + n);
    }

    static std::vector<double> adjoint(const ExitSystem& sys, const std::vector<double>& kernels,
                                       std::int32_t start) {
        const int n = sys.n_interior;
        const int m = 2 * sys.d;
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        r(start) = 1.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) {
                const std::int32_t code = sys.nbr[static_cast<std::size_t>(i) * m + k];
                if (code >= 0) a(code, i) -= kernels[static_cast<std::size_t>(i) * m + k];
            }
        }
        const Eigen::VectorXd g = a.partialPivLu().solve(r);
        return std::vector<double>(g.data(), g.data() + n);
    }
};

double forward_residual(const ExitSystem& sys, const std::vector<double>& kernels,
                        const std::vector<double>& h, const std::vector<double>& rhs) {
    const int m = 2 * sys.d;
    double res = 0.0;
    for (std::int32_t i = 0; i < sys.n_interior; ++i) {
        double acc = rhs[static_cast<std::size_t>(i)];
        for (int k = 0; k < m; ++k) {
            const std::int32_t code = sys.nbr[static_cast<std::size_t>(i) * m + k];
            if (code >= 0) acc += kernels[static_cast<std::size_t>(i) * m + k] * h[static_cast<std::size_t>(code)];
        }
        res = std::max(res, std::abs(h[static_cast<std::size_t>(i)] - acc));
    }
    return res;
}

double adjoint_residual(const ExitSystem& sys, const std::vector<double>& kernels,
                        const std::vector<double>& g, std::int32_t start) {
    const int m = 2 * sys.d;
    double res = 0.0;
    for (std::int32_t j = 0; j < sys.n_interior; ++j) {
        double acc = (j == start) ? 1.0 : 0.0;
        for (int k = 0; k < m; ++k) {
            // in-neighbor: x = y - step_k sits in direction k^1 from y
            const std::int32_t ix = sys.nbr[static_cast<std::size_t>(j) * m + (k ^ 1)];
            if (ix >= 0) acc += kernels[static_cast<std::size_t>(ix) * m + k] * g[static_cast<std::size_t>(ix)];
        }
        res = std::max(res, std::abs(g[static_cast<std::size_t>(j)] - acc));
    }
    return res;
}

}  // namespace

ExitSystem ExitSystem::build(const Region& region) {
    ExitSystem sys;
    sys.d = region.d;
    sys.n_interior = static_cast<std::int32_t>(region.interior.size());
    sys.n_boundary = static_cast<std::int32_t>(region.boundary.size());
    const int m = 2 * region.d;
    sys.nbr.resize(static_cast<std::size_t>(sys.n_interior) * m);
    sys.target = region.is_target;
    for (std::int32_t i = 0; i < sys.n_interior; ++i) {
        for (int k = 0; k < m; ++k) {
            const Site nb = neighbor(region.interior[static_cast<std::size_t>(i)], k);
            auto it = region.interior_index.find(nb);
            std::int32_t code;
            if (it != region.interior_index.end()) {
                code = it->second;
            } else {
                auto bt = region.boundary_index.find(nb);
                if (bt == region.boundary_index.end()) {
                    throw ValidationError("region neighbor closure violated");
                }
                code = ~bt->second;
            }
            sys.nbr[static_cast<std::size_t>(i) * m + k] = code;
        }
    }
    return sys;
}

std::vector<double> realize_kernels(const EnvironmentLaw& law, const Region& region,
                                    std::uint64_t seed) {
    const int m = 2 * law.dim();
    if (law.dim() != region.d) throw ValidationError("law/region dimension mismatch");
    std::vector<double> kernels(region.interior.size() * static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < region.interior.size(); ++i) {
        const SiteKernel k = law.sample(region.interior[i], seed);
        for (int j = 0; j < m; ++j) kernels[i * m + j] = k.p[j];
    }
    return kernels;
}

std::vector<double> realize_kernels(const Environment& env, const Region& region) {
    const int m = 2 * env.dim();
    if (env.dim() != region.d) throw ValidationError("environment/region dimension mismatch");
    std::vector<double> kernels(region.interior.size() * static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < region.interior.size(); ++i) {
        const SiteKernel& k = env.kernel(region.interior[i]);
        for (int j = 0; j < m; ++j) kernels[i * m + j] = k.p[j];
    }
    return kernels;
}

SolveResult solve_hitting(const ExitSystem& sys, const std::vector<double>& kernels,
                          const SolverConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
    const int m = 2 * sys.d;
    const std::size_t n = static_cast<std::size_t>(sys.n_interior);

    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const std::int32_t code = sys.nbr[i * m + k];
            if (code < 0 && sys.target[static_cast<std::size_t>(~code)]) rhs[i] += kernels[i * m + k];
        }
    }

    SolveResult out;
    if (cfg.mode == SolverConfig::Mode::dense) {
        if (sys.n_interior > 5000) {
            throw ValidationError("dense solver is limited to 5000 interior sites");
        }
        out.values = DenseSolves::forward(sys, kernels);
        out.residual = forward_residual(sys, kernels, out.values, rhs);
        return out;
    }

    // Gauss-Seidel sweeps, lexicographic order, zero start vector.
    std::vector<double> h(n, 0.0);
    long sweeps = 0;
    for (;;) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = rhs[i];
            for (int k = 0; k < m; ++k) {
                const std::int32_t code = sys.nbr[i * m + k];
                if (code >= 0) acc += kernels[i * m + k] * h[static_cast<std::size_t>(code)];
            }
            max_delta = std::max(max_delta, std::abs(acc - h[i]));
            h[i] = acc;
        }
        ++sweeps;
        if (max_delta <= cfg.tolerance) {
            const double res = forward_residual(sys, kernels, h, rhs);
            if (res <= cfg.tolerance) {
                out.values = std::move(h);
                out.residual = res;
                out.sweeps = sweeps;
                return out;
            }
        }
        if (sweeps >= cfg.max_sweeps) {
            throw SolverError("hitting solve did not converge", forward_residual(sys, kernels, h, rhs),
                              sweeps);
        }
    }
}

SolveResult solve_occupation(const ExitSystem& sys, const std::vector<double>& kernels,
                             std::int32_t start, const SolverConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
    if (start < 0 || start >= sys.n_interior) throw ValidationError("start index out of range");
    const int m = 2 * sys.d;
    const std::size_t n = static_cast<std::size_t>(sys.n_interior);

    SolveResult out;
    if (cfg.mode == SolverConfig::Mode::dense) {
        if (sys.n_interior > 5000) {
            throw ValidationError("dense solver is limited to 5000 interior sites");
        }
        out.values = DenseSolves::adjoint(sys, kernels, start);
        out.residual = adjoint_residual(sys, kernels, out.values, start);
        return out;
    }

    std::vector<double> g(n, 0.0);
    long sweeps = 0;
    for (;;) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double acc = (static_cast<std::int32_t>(j) == start) ? 1.0 : 0.0;
            for (int k = 0; k < m; ++k) {
                const std::int32_t ix = sys.nbr[j * m + (k ^ 1)];
                if (ix >= 0) acc += kernels[static_cast<std::size_t>(ix) * m + k] * g[static_cast<std::size_t>(ix)];
            }
            max_delta = std::max(max_delta, std::abs(acc - g[j]));
            g[j] = acc;
        }
        ++sweeps;
        if (max_delta <= cfg.tolerance) {
            const double res = adjoint_residual(sys, kernels, g, start);
            if (res <= cfg.tolerance) {
                out.values = std::move(g);
                out.residual = res;
                out.sweeps = sweeps;
                return out;
            }
        }
        if (sweeps >= cfg.max_sweeps) {
            throw SolverError("occupation solve did not converge",
                              adjoint_residual(sys, kernels, g, start), sweeps);
        }
    }
}

std::vector<double> boundary_push(const ExitSystem& sys, const std::vector<double>& kernels,
                                  const std::vector<double>& occupation) {
    const int m = 2 * sys.d;
    std::vector<double> probs(static_cast<std::size_t>(sys.n_boundary), 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(sys.n_interior); ++i) {
        for (int k = 0; k < m; ++k) {
            const std::int32_t code = sys.nbr[i * m + k];
            if (code < 0) probs[static_cast<std::size_t>(~code)] += kernels[i * m + k] * occupation[i];
        }
    }
    return probs;
}

ExitDistribution exit_distribution(const ExitProblem& problem, const SolverConfig& cfg) {
    if (problem.environment == nullptr || problem.box == nullptr) {
        throw ValidationError("exit problem needs an environment and a box");
    }
    const LatticeBox& box = *problem.box;
    auto it = box.interior_index.find(problem.start);
    if (it == box.interior_index.end()) {
        throw ValidationError("exit problem start site is not interior");
    }
    const Region region = as_region(box);
    const ExitSystem sys = ExitSystem::build(region);
    const std::vector<double> kernels = realize_kernels(*problem.environment, region);

    // Region interior keeps the box's lexicographic order, so the box index is valid.
    const SolveResult occ = solve_occupation(sys, kernels, it->second, cfg);
    const std::vector<double> probs = boundary_push(sys, kernels, occ.values);

    ExitDistribution dist;
    dist.solver_residual = occ.residual;
    double total = 0.0;
    double plus = 0.0;
    dist.probs.reserve(probs.size());
    for (std::size_t b = 0; b < probs.size(); ++b) {
        dist.probs.emplace_back(region.boundary[b], probs[b]);
        total += probs[b];
        if (region.is_target[b]) plus += probs[b];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw SolverError("exit distribution does not sum to 1", std::abs(total - 1.0), occ.sweeps);
    }
    check_prob_floor(plus, "p_plus");
    dist.p_plus = plus;
    dist.rho = (1.0 - plus) / plus;
    return dist;
}

double p_plus(const Environment& env, const BoxSpec& spec, const Site& start,
              const SolverConfig& cfg) {
    const LatticeBox box = build_box(spec);
    ExitProblem problem{&env, &box, start};
    return exit_distribution(problem, cfg).p_plus;
}

double rho(const Environment& env, const BoxSpec& spec, const SolverConfig& cfg) {
    const LatticeBox box = build_box(spec, /*require_origin=*/true);
    ExitProblem problem{&env, &box, Site::origin()};
    return exit_distribution(problem, cfg).rho;
}

double target_exit_infimum(const Region& region, const ExitSystem& sys,
                           const std::vector<double>& kernels,
                           const std::vector<Site>& starts, const SolverConfig& cfg) {
    if (starts.empty()) throw ValidationError("target_exit_infimum needs start sites");
    const SolveResult sol = solve_hitting(sys, kernels, cfg);
    double min_p = 1.0;
    for (const Site& s : starts) {
        auto it = region.interior_index.find(s);
        if (it == region.interior_index.end()) {
            throw ValidationError("start site is not interior to the solve region");
        }
        min_p = std::min(min_p, sol.values[static_cast<std::size_t>(it->second)]);
    }
    return min_p;
}

double x_stat(const Environment& env, const RenormBoxes& rb, const SolverConfig& cfg) {
    const ExitSystem sys = ExitSystem::build(rb.b2);
    const std::vector<double> kernels = realize_kernels(env, rb.b2);
    const double min_p = target_exit_infimum(rb.b2, sys, kernels, rb.b1, cfg);
    check_prob_floor(min_p, "star-boundary exit probability");
    return -std::log(min_p);
}

bool is_bad(const Environment& env, const TileBoxes& tb, const SolverConfig& cfg) {
    const ExitSystem sys = ExitSystem::build(tb.b2);
    const std::vector<double> kernels = realize_kernels(env, tb.b2);
    const double min_p = target_exit_infimum(tb.b2, sys, kernels, tb.b1, cfg);
    return min_p < 0.5;
}

}  // namespace rwre
