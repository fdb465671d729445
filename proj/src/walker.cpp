#include "rwre/walker.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

std::optional<StopReason> classify(const StopRule& stop, const Site& x, long steps_taken) {
    if (const Slab* slab = std::get_if<Slab>(&stop.kind)) {
        switch (slab_membership(*slab, x)) {
            case SlabPosition::exited_front: return StopReason::slab_front;
            case SlabPosition::exited_back: return StopReason::slab_back;
            case SlabPosition::inside: break;
        }
    } else if (auto* box = std::get_if<const LatticeBox*>(&stop.kind)) {
        const LatticeBox& b = **box;
        if (!b.is_interior(x)) {
            const bool plus = std::binary_search(b.boundary_plus.begin(), b.boundary_plus.end(), x);
            return plus ? StopReason::box_plus : StopReason::box_other;
        }
    } else if (const LevelRule* lvl = std::get_if<LevelRule>(&stop.kind)) {
        if (lvl->l.dot_site(x) >= lvl->u + lvl->overshoot) return StopReason::level_reached;
    } else if (const StepsRule* st = std::get_if<StepsRule>(&stop.kind)) {
        if (steps_taken >= st->n) return StopReason::step_cap;
    }
    if (steps_taken >= stop.step_cap) return StopReason::step_cap;
    return std::nullopt;
}

int draw_step(const SiteKernel& kernel, Rng& rng) {
    const double u = rng.next_u01();
    double acc = 0.0;
    const int m = 2 * kernel.d;
    for (int k = 0; k < m - 1; ++k) {
        acc += kernel.p[k];
        if (u < acc) return k;
    }
    return m - 1;
}

template <class KernelFn>
StopReason run_walk(KernelFn&& kernel_at, const Site& start, const StopRule& stop, Rng& rng,
                    std::vector<Site>* record, Site* terminal) {
    Site cur = start;
    if (record) record->push_back(cur);
    long steps = 0;
    for (;;) {
        if (auto reason = classify(stop, cur, steps)) {
            if (terminal) *terminal = cur;
            return *reason;
        }
        const SiteKernel& k = kernel_at(cur);
        cur = neighbor(cur, draw_step(k, rng));
        ++steps;
        if (record) record->push_back(cur);
    }
}

void validate_start(const StopRule& stop, const Site& start) {
    if (auto* box = std::get_if<const LatticeBox*>(&stop.kind)) {
        if (*box == nullptr) throw ValidationError("box stop rule has no box");
        if (!(*box)->is_interior(start)) {
            throw ValidationError("walk start site is not interior to the stopping box");
        }
    }
}

}  // namespace

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::slab_front: return "slab_front";
        case StopReason::slab_back: return "slab_back";
        case StopReason::box_plus: return "box_plus";
        case StopReason::box_other: return "box_other";
        case StopReason::level_reached: return "level_reached";
        case StopReason::step_cap: return "step_cap";
    }
    return "unknown";
}

StopRule StopRule::slab(Slab s) { return StopRule{std::move(s), 100000000}; }
StopRule StopRule::box(const LatticeBox* b) {
    if (b == nullptr) throw ValidationError("box stop rule has no box");
    return StopRule{b, 100000000};
}
StopRule StopRule::level(Direction l, double u, double overshoot) {
    return StopRule{LevelRule{std::move(l), u, overshoot}, 100000000};
}
StopRule StopRule::steps(long n) {
    if (n < 1) throw ValidationError("steps rule needs n >= 1");
    return StopRule{StepsRule{n}, 100000000};
}

Path simulate_quenched(const Environment& env, const Site& start, const StopRule& stop,
                       std::uint64_t seed) {
    validate_start(stop, start);
    Path path;
    path.d = env.dim();
    path.seed = seed;
    Rng rng(hash_combine(seed, 0x57a1cede));
    path.stop_reason = run_walk(
        [&](const Site& s) -> const SiteKernel& { return env.kernel(s); }, start, stop, rng,
        &path.sites, nullptr);
    return path;
}

Path simulate_annealed(const EnvironmentLaw& law, const Site& start, const StopRule& stop,
                       std::uint64_t seed) {
    validate_start(stop, start);
    Path path;
    path.d = law.dim();
    path.seed = seed;
    const std::uint64_t env_seed = hash_combine(seed, 0xa11ea1ed);
    Rng rng(hash_combine(seed, 0x57a1cede));
    // Fresh environment per walk; a private cache keeps revisited kernels.
    std::unordered_map<Site, SiteKernel, SiteHasher> cache;
    auto kernel_at = [&](const Site& s) -> const SiteKernel& {
        auto it = cache.find(s);
        if (it == cache.end()) it = cache.emplace(s, law.sample(s, env_seed)).first;
        return it->second;
    };
    path.stop_reason = run_walk(kernel_at, start, stop, rng, &path.sites, nullptr);
    return path;
}

StopReason annealed_outcome(const EnvironmentLaw& law, const Site& start, const StopRule& stop,
                            std::uint64_t seed) {
    validate_start(stop, start);
    const std::uint64_t env_seed = hash_combine(seed, 0xa11ea1ed);
    Rng rng(hash_combine(seed, 0x57a1cede));
    std::unordered_map<Site, SiteKernel, SiteHasher> cache;
    auto kernel_at = [&](const Site& s) -> const SiteKernel& {
        auto it = cache.find(s);
        if (it == cache.end()) it = cache.emplace(s, law.sample(s, env_seed)).first;
        return it->second;
    };
    Site terminal;
    return run_walk(kernel_at, start, stop, rng, nullptr, &terminal);
}

RegenerationRecord regeneration_times(const Path& path, const Direction& l, double margin) {
    if (path.sites.empty()) throw ValidationError("regeneration scan needs a nonempty path");
    const std::size_t n = path.sites.size();
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = l.dot_site(path.sites[i]);

    std::vector<double> suffix_min(n);
    suffix_min[n - 1] = proj[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) suffix_min[i] = std::min(proj[i], suffix_min[i + 1]);

    // Candidate n: fresh maximum at n, never undershot in the observed window.
    std::vector<long> candidates;
    double prefix_max = proj[0];
    double max_overshoot = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (prefix_max < proj[i] && suffix_min[i] >= proj[i]) {
            candidates.push_back(static_cast<long>(i));
            max_overshoot = std::max(max_overshoot, proj[i] - prefix_max);
        }
        prefix_max = std::max(prefix_max, proj[i]);
    }

    RegenerationRecord rec;
    rec.direction = l;
    rec.margin = (margin < 0.0) ? 2.0 * std::sqrt(static_cast<double>(l.d)) * max_overshoot : margin;
    const double final_level = proj[n - 1];
    for (long t : candidates) {
        if (final_level >= proj[static_cast<std::size_t>(t)] + rec.margin) {
            rec.confirmed_times.push_back(t);
        } else if (!rec.provisional_time) {
            rec.provisional_time = t;
        }
    }
    return rec;
}

DirectionEstimate asymptotic_direction(const std::vector<Path>& paths) {
    if (paths.empty()) throw ValidationError("asymptotic direction needs at least one path");
    const int d = paths.front().d;
    std::array<double, kMaxDim> acc{};
    std::vector<std::array<double, kMaxDim>> units;
    int skipped = 0;
    for (const Path& p : paths) {
        const Site& t = p.terminal();
        double norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            norm2 += static_cast<double>(t.c[i]) * static_cast<double>(t.c[i]);
        }
        if (norm2 == 0.0) {
            ++skipped;
            continue;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        std::array<double, kMaxDim> u{};
        for (int i = 0; i < d; ++i) u[i] = static_cast<double>(t.c[i]) * inv;
        for (int i = 0; i < d; ++i) acc[i] += u[i];
        units.push_back(u);
    }
    if (units.empty()) throw ValidationError("all paths have zero terminal site");
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) norm2 += acc[i] * acc[i];
    if (norm2 == 0.0) throw NumericalError("terminal directions cancel; no mean direction");
    const double inv = 1.0 / std::sqrt(norm2);
    std::array<double, kMaxDim> mean{};
    for (int i = 0; i < d; ++i) mean[i] = acc[i] * inv;

    double angle_sum = 0.0;
    for (const auto& u : units) {
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += u[i] * mean[i];
        angle_sum += std::acos(std::clamp(dot, -1.0, 1.0));
    }
    DirectionEstimate est;
    est.direction = Direction(d, mean);
    est.dispersion = angle_sum / static_cast<double>(units.size());
    est.skipped = skipped;
    return est;
}

ProjectionSup projection_sup(const Path& path, const Direction& l, const Direction& vhat,
                             double u, double overshoot) {
    if (path.sites.empty()) throw ValidationError("projection sup needs a nonempty path");
    const int d = path.d;
    ProjectionSup out;
    double max_proj = -1e300;
    std::size_t last_below = path.sites.size();  // sentinel: none
    for (std::size_t i = 0; i < path.sites.size(); ++i) {
        const double p = l.dot_site(path.sites[i]);
        max_proj = std::max(max_proj, p);
        if (p <= u) last_below = i;
    }
    out.censored = max_proj < u + overshoot;
    if (last_below == path.sites.size()) return out;  // never at or below u
    for (std::size_t i = 0; i <= last_below; ++i) {
        const Site& x = path.sites[i];
        const double along = vhat.dot_site(x);
        double norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double t = static_cast<double>(x.c[j]) - along * vhat.v[j];
            norm2 += t * t;
        }
        out.sup = std::max(out.sup, std::sqrt(norm2));
    }
    return out;
}

}  // namespace rwre
