#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

/// Transition vector of one site, indexed (+e1, -e1, ..., +e_d, -e_d).
struct SiteKernel {
    int d = 0;
    std::array<double, 2 * kMaxDim> p{};

    double min_entry() const {
        double m = p[0];
        for (int k = 1; k < 2 * d; ++k) m = std::min(m, p[k]);
        return m;
    }
};

enum class LawKind { deterministic_drift, epsilon_biased, dirichlet };

/// i.i.d. site-kernel law, uniformly elliptic with constant kappa.
class EnvironmentLaw {
public:
    static EnvironmentLaw deterministic_drift(int d, double kappa);
    static EnvironmentLaw epsilon_biased(int d, double delta, double kappa);
    static EnvironmentLaw dirichlet(int d, std::vector<double> alpha, double kappa);

    int dim() const { return d_; }
    LawKind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double delta() const { return delta_; }
    const std::vector<double>& alpha() const { return alpha_; }
    const char* tag() const;
    bool is_deterministic() const { return kind_ == LawKind::deterministic_drift; }

    /// Kernel at `site` under master seed `seed`: a pure function of
    /// (law, seed, site), independent of query order, reentrant.
    SiteKernel sample(const Site& site, std::uint64_t seed) const;

    /// Folded into per-site stream keys so distinct laws decorrelate.
    std::uint64_t law_hash() const { return law_hash_; }

private:
    EnvironmentLaw() = default;

    int d_ = 0;
    LawKind kind_ = LawKind::deterministic_drift;
    double kappa_ = 0.0;
    double delta_ = 0.0;
    std::vector<double> alpha_;
    std::uint64_t law_hash_ = 0;
};

/// Lazy seed-deterministic environment: kernels are sampled on first query
/// and memoized. Safe for concurrent queries (insertions serialized).
class Environment {
public:
    Environment(EnvironmentLaw law, std::uint64_t master_seed)
        : law_(std::move(law)), master_seed_(master_seed) {}

    const EnvironmentLaw& law() const { return law_; }
    std::uint64_t master_seed() const { return master_seed_; }
    int dim() const { return law_.dim(); }

    const SiteKernel& kernel(const Site& site) const;

    std::size_t realized_count() const;

private:
    EnvironmentLaw law_;
    std::uint64_t master_seed_ = 0;
    mutable std::mutex mu_;
    mutable std::unordered_map<Site, SiteKernel, SiteHasher> cache_;
};

inline Environment environment_view(EnvironmentLaw law, std::uint64_t master_seed) {
    return Environment(std::move(law), master_seed);
}

/// Minimum kernel entry over `region`; throws if it undercuts the law's kappa.
double ellipticity_check(const Environment& env, const std::vector<Site>& region);

/// Realized snapshot: header metadata plus explicit per-site kernels.
struct EnvironmentSnapshot {
    int d = 0;
    std::string law_tag;
    double kappa = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<Site, SiteKernel>> kernels;  // lexicographic by site

    const SiteKernel* find(const Site& site) const;
};

void save_environment(const Environment& env, const std::vector<Site>& region,
                      const std::string& path);
EnvironmentSnapshot load_environment(const std::string& path, int expected_dim = 0);

}  // namespace rwre
