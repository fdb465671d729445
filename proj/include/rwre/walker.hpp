#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

enum class StopReason { slab_front, slab_back, box_plus, box_other, level_reached, step_cap };

const char* stop_reason_name(StopReason r);

/// Stop when X.l >= u + overshoot.
struct LevelRule {
    Direction l;
    double u = 0.0;
    double overshoot = 0.0;
};

struct StepsRule {
    long n = 0;
};

struct StopRule {
    std::variant<Slab, const LatticeBox*, LevelRule, StepsRule> kind;
    long step_cap = 100000000;  // always-on guard

    static StopRule slab(Slab s);
    static StopRule box(const LatticeBox* b);
    static StopRule level(Direction l, double u, double overshoot);
    static StopRule steps(long n);
};

struct Path {
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<Site> sites;  // starts at the start site
    StopReason stop_reason = StopReason::step_cap;

    const Site& terminal() const { return sites.back(); }
};

/// Quenched walk: steps drawn from the environment's site kernels,
/// deterministic given (env, seed).
Path simulate_quenched(const Environment& env, const Site& start, const StopRule& stop,
                       std::uint64_t seed);

/// Annealed walk: one walk in a fresh lazy environment derived from `seed`.
Path simulate_annealed(const EnvironmentLaw& law, const Site& start, const StopRule& stop,
                       std::uint64_t seed);

/// Annealed walk without path storage; returns only the stop reason.
StopReason annealed_outcome(const EnvironmentLaw& law, const Site& start, const StopRule& stop,
                            std::uint64_t seed);

struct RegenerationRecord {
    Direction direction;
    double margin = 0.0;                  // confirmation margin actually used
    std::vector<long> confirmed_times;    // strictly increasing
    std::optional<long> provisional_time; // earliest unconfirmed candidate
};

/// Regeneration times along direction l: time n is a candidate when the
/// projection reaches a fresh maximum at n never undershot afterwards within
/// the observed window; it is confirmed when the final level exceeds it by at
/// least `margin`. margin < 0 selects the default 2 sqrt(d) x the largest
/// observed single-candidate overshoot.
RegenerationRecord regeneration_times(const Path& path, const Direction& l, double margin = -1.0);

struct DirectionEstimate {
    Direction direction;
    double dispersion = 0.0;  // mean angle to the estimated direction
    int skipped = 0;          // paths with zero terminal site
};

DirectionEstimate asymptotic_direction(const std::vector<Path>& paths);

struct ProjectionSup {
    double sup = 0.0;
    bool censored = false;  // the path never exceeded u + overshoot
};

/// sup |pi(X_n)| over 0 <= n <= last index with X_n.l <= u, where pi projects
/// onto the orthogonal complement of vhat.
ProjectionSup projection_sup(const Path& path, const Direction& l, const Direction& vhat,
                             double u, double overshoot);

}  // namespace rwre
