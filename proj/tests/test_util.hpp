#pragma once

// Shared test-only oracles. These deliberately avoid the library's solver and
// walker code paths: walks run on std::mt19937_64 with hand-rolled stepping,
// so agreement with the implementation is evidence, not tautology.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/lattice.hpp"

namespace rwre::testutil {

struct McEstimate {
    double p = 0.0;
    double se = 0.0;
    long hits = 0;
    long n = 0;
};

// Monte Carlo estimate of P_start(first boundary hit lands in the target set)
// for a fixed environment given by kernel_at.
inline McEstimate mc_target_exit(const Region& region,
                                 const std::function<SiteKernel(const Site&)>& kernel_at,
                                 const Site& start, long n_walks, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long hits = 0;
    for (long w = 0; w < n_walks; ++w) {
        Site cur = start;
        for (;;) {
            auto bt = region.boundary_index.find(cur);
            if (bt != region.boundary_index.end()) {
                if (region.is_target[static_cast<std::size_t>(bt->second)]) ++hits;
                break;
            }
            const SiteKernel k = kernel_at(cur);
            const double u = unif(gen);
            double acc = 0.0;
            int pick = 2 * k.d - 1;
            for (int i = 0; i < 2 * k.d - 1; ++i) {
                acc += k.p[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            cur = neighbor(cur, pick);
        }
    }
    McEstimate est;
    est.hits = hits;
    est.n = n_walks;
    est.p = static_cast<double>(hits) / static_cast<double>(n_walks);
    est.se = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(n_walks));
    return est;
}

// Environment-backed kernel accessor (memoized by the environment itself).
inline std::function<SiteKernel(const Site&)> kernels_of(const Environment& env) {
    return [&env](const Site& s) { return env.kernel(s); };
}

inline Site site2(int x, int y) {
    Site s{};
    s.c[0] = static_cast<std::int32_t>(x);
    s.c[1] = static_cast<std::int32_t>(y);
    return s;
}

inline Site site3(int x, int y, int z) {
    Site s = site2(x, y);
    s.c[2] = static_cast<std::int32_t>(z);
    return s;
}

}  // namespace rwre::testutil
