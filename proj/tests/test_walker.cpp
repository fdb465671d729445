#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"
#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

#include "test_util.hpp"

using namespace rwre;
using testutil::site2;

namespace {

Path straight_path(int n, const Site& step_dir) {
    Path p;
    p.d = 2;
    Site cur{};
    p.sites.push_back(cur);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 2; ++j) cur.c[j] += step_dir.c[j];
        p.sites.push_back(cur);
    }
    p.stop_reason = StopReason::level_reached;
    return p;
}

Path path_from_projections(const std::vector<int>& xs) {
    Path p;
    p.d = 2;
    for (int x : xs) p.sites.push_back(site2(x, 0));
    p.stop_reason = StopReason::level_reached;
    return p;
}

}  // namespace

TEST_CASE("paths take unit steps and honor steps rule") {
    const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.05);
    const Environment env(law, 31);
    const Path p = simulate_quenched(env, Site::origin(), StopRule::steps(5), 99);
    CHECK(p.sites.size() == 6);
    CHECK(p.stop_reason == StopReason::step_cap);
    for (std::size_t i = 1; i < p.sites.size(); ++i) {
        int dist = 0;
        for (int j = 0; j < 2; ++j) dist += std::abs(p.sites[i].c[j] - p.sites[i - 1].c[j]);
        CHECK(dist == 1);
    }
}

TEST_CASE("same (env, seed) gives identical paths; different seeds differ") {
    const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.05);
    const Environment env(law, 4);
    const Path a = simulate_quenched(env, Site::origin(), StopRule::steps(200), 7);
    const Path b = simulate_quenched(env, Site::origin(), StopRule::steps(200), 7);
    CHECK(a.sites == b.sites);
    const Path c = simulate_quenched(env, Site::origin(), StopRule::steps(200), 8);
    CHECK(a.sites != c.sites);

    const Path ann1 = simulate_annealed(law, Site::origin(), StopRule::steps(200), 7);
    const Path ann2 = simulate_annealed(law, Site::origin(), StopRule::steps(200), 7);
    CHECK(ann1.sites == ann2.sites);
}

TEST_CASE("drift walk reaches its level in about u steps") {
    const EnvironmentLaw law = EnvironmentLaw::deterministic_drift(2, 0.001);
    const Environment env(law, 1);
    const StopRule rule = StopRule::level(Direction::axis(2, 0), 10.0, 0.0);
    int exact = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const Path p = simulate_quenched(env, Site::origin(), rule, seed_for_index(55, i));
        CHECK(p.stop_reason == StopReason::level_reached);
        if (p.sites.size() == 11) ++exact;  // ten +e1 steps straight
    }
    // P(10 straight forward steps) = 0.997^10 ~ 0.9704, se ~ 0.004
    const double freq = static_cast<double>(exact) / n;
    CHECK(freq == doctest::Approx(std::pow(0.997, 10)).epsilon(0.02));
}

TEST_CASE("slab stop reasons match the slab classification") {
    const EnvironmentLaw law = EnvironmentLaw::deterministic_drift(2, 0.05);
    const Slab slab(Direction::axis(2, 0), 1.0, 6.0);
    for (int i = 0; i < 50; ++i) {
        const Path p = simulate_annealed(law, Site::origin(), StopRule::slab(slab), i);
        const SlabPosition pos = slab_membership(slab, p.terminal());
        if (p.stop_reason == StopReason::slab_front) CHECK(pos == SlabPosition::exited_front);
        if (p.stop_reason == StopReason::slab_back) CHECK(pos == SlabPosition::exited_back);
        for (std::size_t k = 0; k + 1 < p.sites.size(); ++k) {
            CHECK(slab_membership(slab, p.sites[k]) == SlabPosition::inside);
        }
    }
}

TEST_CASE("annealed symmetric slab exits back with probability 1/2") {
    const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.01);
    const StopRule rule = StopRule::slab(Slab(Direction::axis(2, 0), 1.0, 10.0));
    long back = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i) {
        if (annealed_outcome(law, Site::origin(), rule, seed_for_index(202, i)) ==
            StopReason::slab_back) {
            ++back;
        }
    }
    const double freq = static_cast<double>(back) / n;
    const double se = std::sqrt(0.25 / n);
    CHECK(std::abs(freq - 0.5) < 5.0 * se);
}

TEST_CASE("annealed drift slab almost never exits back") {
    const EnvironmentLaw law = EnvironmentLaw::deterministic_drift(2, 0.05);
    const StopRule rule = StopRule::slab(Slab(Direction::axis(2, 0), 1.0, 10.0));
    long back = 0;
    const long n = 100000;
    for (long i = 0; i < n; ++i) {
        if (annealed_outcome(law, Site::origin(), rule, seed_for_index(303, i)) ==
            StopReason::slab_back) {
            ++back;
        }
    }
    CHECK(static_cast<double>(back) / n < 1e-3);
}

TEST_CASE("box walks classify their exit side") {
    const EnvironmentLaw law = EnvironmentLaw::deterministic_drift(2, 0.02);
    const Environment env(law, 12);
    const LatticeBox box = build_box(BoxSpec(Rotation::identity(2), 2.0, 4.0, 3.0), true);
    int plus = 0;
    for (int i = 0; i < 200; ++i) {
        const Path p = simulate_quenched(env, Site::origin(), StopRule::box(&box), i);
        if (p.stop_reason == StopReason::box_plus) {
            ++plus;
            CHECK(std::binary_search(box.boundary_plus.begin(), box.boundary_plus.end(),
                                     p.terminal()));
        } else {
            CHECK(p.stop_reason == StopReason::box_other);
        }
    }
    CHECK(plus > 150);  // strong drift exits forward almost always
    CHECK_THROWS_AS(simulate_quenched(env, site2(9, 9), StopRule::box(&box), 0), ValidationError);
}

TEST_CASE("regeneration times: straight path") {
    const Path p = straight_path(12, site2(1, 0));
    const RegenerationRecord rec = regeneration_times(p, Direction::axis(2, 0), 1.0);
    // times 1..11 confirmed (final level 12 needs X_n + 1 <= 12)
    REQUIRE(rec.confirmed_times.size() == 11);
    for (std::size_t i = 0; i < rec.confirmed_times.size(); ++i) {
        CHECK(rec.confirmed_times[i] == static_cast<long>(i + 1));
    }
    CHECK(rec.provisional_time.has_value());
    CHECK(*rec.provisional_time == 12);
}

TEST_CASE("regeneration times: the walk-through example follows the strict definition") {
    // projections 0, 1, 0, 1, 2: time 1 fails (level re-undershot), time 3 is
    // not a fresh maximum (1 was already attained), time 4 qualifies.
    const Path p = path_from_projections({0, 1, 0, 1, 2});
    const RegenerationRecord rec = regeneration_times(p, Direction::axis(2, 0), 0.0);
    REQUIRE(rec.confirmed_times.size() == 1);
    CHECK(rec.confirmed_times[0] == 4);
    CHECK_FALSE(rec.provisional_time.has_value());
}

TEST_CASE("regeneration times: censoring at the path end") {
    const Path p = path_from_projections({0, 1, 2});
    const RegenerationRecord rec = regeneration_times(p, Direction::axis(2, 0), 1.0);
    // time 1: final level 2 >= 1 + 1, confirmed; time 2: 2 < 2 + 1, provisional
    REQUIRE(rec.confirmed_times.size() == 1);
    CHECK(rec.confirmed_times[0] == 1);
    REQUIRE(rec.provisional_time.has_value());
    CHECK(*rec.provisional_time == 2);
}

TEST_CASE("regeneration increments have stationary means across indices") {
    // Renewal structure: (X_{tau_{k+1}} - X_{tau_k}).l should look i.i.d. for
    // k >= 1. Compare early vs late increment means over many walks.
    const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {2.0, 0.5, 1.0, 1.0}, 0.01);
    const Direction l = Direction::axis(2, 0);
    double sum_first = 0.0, sum_later = 0.0, sumsq_first = 0.0, sumsq_later = 0.0;
    long n_first = 0, n_later = 0;
    for (int w = 0; w < 1000; ++w) {
        const Path p = simulate_annealed(law, Site::origin(), StopRule::steps(4000),
                                         seed_for_index(404, w));
        const RegenerationRecord rec = regeneration_times(p, l, 8.0);
        for (std::size_t k = 1; k + 1 < rec.confirmed_times.size(); ++k) {
            const double inc = l.dot_site(p.sites[static_cast<std::size_t>(rec.confirmed_times[k + 1])]) -
                               l.dot_site(p.sites[static_cast<std::size_t>(rec.confirmed_times[k])]);
            if (k <= 3) {
                sum_first += inc;
                sumsq_first += inc * inc;
                ++n_first;
            } else if (k >= 8 && k <= 11) {
                sum_later += inc;
                sumsq_later += inc * inc;
                ++n_later;
            }
        }
    }
    REQUIRE(n_first > 500);
    REQUIRE(n_later > 500);
    const double m1 = sum_first / n_first;
    const double m2 = sum_later / n_later;
    const double v1 = sumsq_first / n_first - m1 * m1;
    const double v2 = sumsq_later / n_later - m2 * m2;
    const double se = std::sqrt(v1 / n_first + v2 / n_later);
    CHECK(std::abs(m1 - m2) < 4.0 * se);
}

TEST_CASE("asymptotic direction: exact cases") {
    std::vector<Path> along_e1(3, straight_path(5, site2(1, 0)));
    const DirectionEstimate est = asymptotic_direction(along_e1);
    CHECK(est.direction.v[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.dispersion == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(est.skipped == 0);

    std::vector<Path> mixed = {straight_path(5, site2(1, 0)), straight_path(5, site2(0, 1))};
    const DirectionEstimate diag = asymptotic_direction(mixed);
    CHECK(diag.direction.v[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(diag.direction.v[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // zero terminal sites are skipped with a count
    Path zero;
    zero.d = 2;
    zero.sites = {Site::origin()};
    mixed.push_back(zero);
    CHECK(asymptotic_direction(mixed).skipped == 1);
    // output is always unit length
    double norm2 = 0.0;
    for (int i = 0; i < 2; ++i) norm2 += diag.direction.v[i] * diag.direction.v[i];
    CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-12);
}

TEST_CASE("asymptotic direction under drift concentrates on e1") {
    const EnvironmentLaw law = EnvironmentLaw::deterministic_drift(2, 0.05);
    std::vector<Path> paths;
    for (int i = 0; i < 300; ++i) {
        paths.push_back(simulate_annealed(law, Site::origin(), StopRule::steps(3000),
                                          seed_for_index(505, i)));
    }
    const DirectionEstimate est = asymptotic_direction(paths);
    CHECK(est.direction.v[0] > 0.99);
}

TEST_CASE("projection_sup: axis paths and transverse excursions") {
    const Direction e1 = Direction::axis(2, 0);
    SUBCASE("straight along the axis") {
        const Path p = straight_path(12, site2(1, 0));
        const ProjectionSup ps = projection_sup(p, e1, e1, 5.0, 2.0);
        CHECK(ps.sup == doctest::Approx(0.0).epsilon(1e-15));
        CHECK_FALSE(ps.censored);  // reached 12 >= 5 + 2
    }
    SUBCASE("one transverse excursion of size 1") {
        Path p;
        p.d = 2;
        p.sites.push_back(Site::origin());
        p.sites.push_back(site2(0, 1));
        for (int x = 1; x <= 10; ++x) p.sites.push_back(site2(x, 1));
        const ProjectionSup ps = projection_sup(p, e1, e1, 5.0, 2.0);
        CHECK(ps.sup == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(ps.censored);
    }
    SUBCASE("censored when the overshoot was never reached") {
        const Path p = straight_path(6, site2(1, 0));
        const ProjectionSup ps = projection_sup(p, e1, e1, 5.0, 2.0);
        CHECK(ps.censored);  // max level 6 < 5 + 2
    }
}

TEST_CASE("projection_sup stable under a larger observation window when uncensored") {
    const EnvironmentLaw law = EnvironmentLaw::epsilon_biased(2, 0.05, 0.1);
    const Direction e1 = Direction::axis(2, 0);
    for (int i = 0; i < 30; ++i) {
        const std::uint64_t seed = seed_for_index(606, i);
        const Environment env(law, seed);
        const Path shorter =
            simulate_quenched(env, Site::origin(), StopRule::level(e1, 20.0, 5.0), seed);
        const Path longer =
            simulate_quenched(env, Site::origin(), StopRule::level(e1, 20.0, 15.0), seed);
        const ProjectionSup a = projection_sup(shorter, e1, e1, 20.0, 5.0);
        const ProjectionSup b = projection_sup(longer, e1, e1, 20.0, 5.0);
        if (!a.censored) {
            // same walk observed longer: the recorded sup up to L_u cannot move
            CHECK(b.sup >= a.sup - 1e-12);
        }
    }
}

TEST_CASE("transverse fluctuation tail decays along the level grid") {
    // Direction of Theorem-style control: P(sup |pi(X)| >= u^{3/4}) shrinks as
    // u grows. The epsilon-biased law keeps enough transverse spread for the
    // event to be visible at small u.
    const EnvironmentLaw law = EnvironmentLaw::epsilon_biased(2, 0.05, 0.1);
    const Direction e1 = Direction::axis(2, 0);
    auto tail_freq = [&](double u, std::uint64_t seed_base) {
        long hit = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const Path p = simulate_annealed(law, Site::origin(),
                                             StopRule::level(e1, u, 10.0),
                                             seed_for_index(seed_base, i));
            const ProjectionSup ps = projection_sup(p, e1, e1, u, 10.0);
            if (ps.sup >= std::pow(u, 0.75)) ++hit;
        }
        return static_cast<double>(hit) / n;
    };
    const double f25 = tail_freq(25.0, 707);
    const double f50 = tail_freq(50.0, 708);
    const double f100 = tail_freq(100.0, 709);
    CHECK(f25 > 0.0);  // event visible at the small scale
    CHECK(f50 <= f25 + 0.02);
    CHECK(f100 < f25);
}
