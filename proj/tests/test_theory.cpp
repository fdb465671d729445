#include "doctest.h"

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/theory.hpp"

using namespace rwre;
namespace th = rwre::theory;

TEST_CASE("gamma_d values and limit") {
    CHECK(th::gamma_d(2) == doctest::Approx((std::sqrt(10.0) - 2.0) / 3.0).epsilon(1e-15));
    CHECK(std::abs(th::gamma_d(2) - 0.387426) < 5e-6);
    CHECK(std::abs(th::gamma_d(1000000) - (std::sqrt(3.0) - 1.0) / 2.0) < 1e-5);
    CHECK_THROWS_AS(th::gamma_d(1), ValidationError);
}

TEST_CASE("gamma_d decreases monotonically in d") {
    for (long long d = 2; d < 100; ++d) CHECK(th::gamma_d(d + 1) < th::gamma_d(d));
}

TEST_CASE("f endpoints and affine slope") {
    const double gamma = 0.42;
    const int d = 3;
    const double lo = 1.0 / (1.0 + gamma);
    CHECK(th::f_beta(gamma, d, lo) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(th::f_beta(gamma, d, 1.0) == doctest::Approx(static_cast<double>(d)).epsilon(1e-14));
    CHECK_THROWS_AS(th::f_beta(gamma, d, lo - 1e-6), ValidationError);
    CHECK_THROWS_AS(th::f_beta(gamma, d, 1.0 + 1e-6), ValidationError);

    // slope d(1+gamma)/gamma, exactly affine
    const double slope = d * (1.0 + gamma) / gamma;
    const double x = 0.8, y = 0.9;
    CHECK(th::f_beta(gamma, d, y) - th::f_beta(gamma, d, x) ==
          doctest::Approx(slope * (y - x)).epsilon(1e-12));
    CHECK(slope > d);
}

TEST_CASE("f simplifies to 6 beta - 4 for gamma = 0.5, d = 2") {
    CHECK(th::f_beta(0.5, 2, 0.8) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(th::big_F(0.5, 2, 0.9) == doctest::Approx(1.9).epsilon(1e-12));  // 6x - 3.5
}

TEST_CASE("fixed point closed form and instability") {
    CHECK(th::fixed_point(0.5, 2) == doctest::Approx(0.7).epsilon(1e-14));
    // F(x*) = x* on a parameter grid
    for (int d = 2; d <= 11; ++d) {
        for (double gamma = 0.1; gamma < 0.95; gamma += 0.07) {
            const double xs = th::fixed_point(gamma, d);
            CHECK(std::abs(th::big_F(gamma, d, xs) - xs) < 1e-12);
        }
    }
    // below gamma_2, 2 gamma sits below x*, so F decreases there
    const double g = 0.35;
    CHECK(2.0 * g < th::fixed_point(g, 2));
    CHECK(th::big_F(g, 2, 0.7) < 0.7);
    // x* > 1/(1+gamma) throughout gamma in (0, 0.5]
    for (int d = 2; d <= 6; ++d) {
        for (int i = 1; i <= 100; ++i) {
            const double gamma = 0.005 * i;
            CHECK(th::fixed_point(gamma, d) > 1.0 / (1.0 + gamma));
        }
    }
}

TEST_CASE("gamma_d solves 2 gamma = x*") {
    for (int d = 2; d <= 50; ++d) {
        const double g = th::gamma_d(d);
        CHECK(std::abs(th::fixed_point(g, d) - 2.0 * g) < 1e-10);
    }
}

TEST_CASE("iterate_F is monotone away from the fixed point") {
    const int d = 2;
    const double gamma = 0.45;
    const double xs = th::fixed_point(gamma, d);
    const auto up = th::iterate_F(gamma, d, xs + 0.05, 8);
    for (std::size_t i = 0; i + 1 < up.size(); ++i) CHECK(up[i + 1] > up[i]);
    const auto down = th::iterate_F(gamma, d, xs - 0.05, 8);
    for (std::size_t i = 0; i + 1 < down.size(); ++i) CHECK(down[i + 1] < down[i]);
    // one application suffices at gamma = 0.5 from 0.9
    const auto quick = th::iterate_F(0.5, d, 0.9, 8);
    REQUIRE(quick.size() == 2);
    CHECK(quick[1] == doctest::Approx(1.9).epsilon(1e-12));
}

TEST_CASE("build_ladder at gamma = 0.45, d = 2: one rung") {
    const auto lr = th::build_ladder(0.45, 2);
    CHECK(lr.feasible);
    CHECK(lr.x_star == doctest::Approx(0.73367).epsilon(1e-4));
    CHECK(lr.beta0 == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(lr.n == 1);
    REQUIRE(lr.betas.size() == 1);
    CHECK(lr.betas[0] > 1.0 / 1.45);
    CHECK(lr.betas[0] < 0.9);
    CHECK(th::big_F(0.45, 2, 0.9) == doctest::Approx(1.80556).epsilon(1e-4));
    for (const auto& check : lr.checks) CHECK(check.ok);
}

TEST_CASE("build_ladder at gamma = 0.5, d = 2 is feasible with one rung") {
    const auto lr = th::build_ladder(0.5, 2);
    CHECK(lr.feasible);
    CHECK(lr.n == 1);
    CHECK(lr.betas[0] > 2.0 / 3.0);
    CHECK(lr.betas[0] < 1.0);
}

TEST_CASE("build_ladder dichotomy around gamma_d") {
    for (int d = 2; d <= 10; ++d) {
        const double gd = th::gamma_d(d);
        const auto good = th::build_ladder(gd + 0.01, d);
        CHECK(good.feasible);
        for (const auto& check : good.checks) CHECK(check.ok);

        const auto bad = th::build_ladder(gd - 0.01, d);
        CHECK_FALSE(bad.feasible);
        CHECK(!bad.failure_reason.empty());
        // iterates decrease when 2 gamma < x*
        REQUIRE(bad.iterates.size() >= 2);
        for (std::size_t i = 0; i + 1 < bad.iterates.size(); ++i) {
            CHECK(bad.iterates[i + 1] < bad.iterates[i]);
        }
    }
}

TEST_CASE("build_ladder literal-gamma stopping diagnostic") {
    const auto by_2g = th::build_ladder(0.45, 2, 0.01, false);
    const auto by_g = th::build_ladder(0.45, 2, 0.01, true);
    CHECK(by_2g.n_from_iterates == 1);        // F(0.9) > 1 immediately
    CHECK(by_g.n_from_iterates == 0);         // iterates of 0.45 < 1/(1+gamma) never exceed 1
    CHECK(by_2g.feasible == by_g.feasible);   // the constructive ladder is unchanged
    CHECK(by_2g.betas == by_g.betas);
}

TEST_CASE("seed exponent") {
    CHECK(th::seed_exponent(1.0, 0.75, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(th::seed_exponent(0.45, 0.6, 0.8) == doctest::Approx(0.27).epsilon(1e-12));
    // continuity across the crossover beta + beta0 - 1 = gamma beta0
    const double gamma = 0.5, beta0 = 0.6;
    const double beta_cross = 1.0 - beta0 * (1.0 - gamma);
    const double left = th::seed_exponent(gamma, beta0, beta_cross - 1e-9);
    const double right = th::seed_exponent(gamma, beta0, beta_cross + 1e-9);
    CHECK(std::abs(left - right) < 1e-8);
    CHECK_THROWS_AS(th::seed_exponent(0.5, 0.4, 0.8), ValidationError);
}

TEST_CASE("interpolation_f endpoints") {
    CHECK(th::interpolation_f(0.6, 0.17, 3, 0.6) == doctest::Approx(0.17).epsilon(1e-15));
    CHECK(th::interpolation_f(0.6, 0.17, 3, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    const double mid = th::interpolation_f(0.6, 0.17, 3, 0.8);
    CHECK(mid == doctest::Approx(0.17 + 0.5 * (3.0 - 0.17)).epsilon(1e-12));
    CHECK_THROWS_AS(th::interpolation_f(0.6, 0.17, 3, 0.5), ValidationError);
}

TEST_CASE("f_eps endpoints and the eps -> 0 limit") {
    for (double gamma : {0.3, 0.45, 0.6}) {
        for (double eps : {1e-3, 1e-4}) {
            const double lo = 1.0 / (1.0 + gamma) + eps;
            CHECK(std::abs(th::f_eps(gamma, 2, eps, lo) - eps) < 1e-12);
            CHECK(std::abs(th::f_eps(gamma, 2, eps, 1.0) - 2.0) < 1e-12);
            CHECK(std::abs(th::f_eps(gamma, 5, eps, 1.0) - 5.0) < 1e-12);
        }
        for (double beta = 1.0 / (1.0 + gamma) + 0.01; beta < 1.0; beta += 0.05) {
            CHECK(std::abs(th::f_eps(gamma, 2, 1e-6, beta) - th::f_beta(gamma, 2, beta)) < 1e-4);
        }
    }
}
