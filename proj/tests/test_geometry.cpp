#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"
#include "rwre/rotation.hpp"

#include "test_util.hpp"

using namespace rwre;
using testutil::site2;

namespace {

void check_rotation_invariants(const Rotation& r, const Direction& l) {
    const int d = r.dim();
    for (int i = 0; i < d; ++i) {
        CHECK(std::abs(r.at(i, 0) - l.v[i]) < 1e-10);
    }
    // constructor already enforces orthogonality and det +1; spot-check R^T R.
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k) acc += r.at(k, i) * r.at(k, j);
            CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

}  // namespace

TEST_CASE("rotation_from_direction: identity for e1") {
    const Rotation r = rotation_from_direction(Direction::axis(2, 0));
    CHECK(r.at(0, 0) == doctest::Approx(1.0));
    CHECK(r.at(0, 1) == doctest::Approx(0.0));
    CHECK(r.at(1, 0) == doctest::Approx(0.0));
    CHECK(r.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("rotation_from_direction: -e1 in d=2 is the rotation by pi") {
    const Rotation r = rotation_from_direction(Direction::axis(2, 0, -1.0));
    CHECK(r.at(0, 0) == doctest::Approx(-1.0));
    CHECK(r.at(1, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(r.at(0, 1)) < 1e-12);
    CHECK(std::abs(r.at(1, 0)) < 1e-12);
}

TEST_CASE("rotation_from_direction: diagonal direction in d=2") {
    const double s = 1.0 / std::sqrt(2.0);
    const Direction l = Direction::from({s, s});
    const Rotation r = rotation_from_direction(l);
    CHECK(r.at(0, 0) == doctest::Approx(s));
    CHECK(r.at(1, 0) == doctest::Approx(s));
    CHECK(r.at(0, 1) == doctest::Approx(-s));
    CHECK(r.at(1, 1) == doctest::Approx(s));
}

TEST_CASE("rotation_from_direction: random directions, d = 2..5") {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> normal;
    for (int d = 2; d <= 5; ++d) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> v(static_cast<std::size_t>(d));
            for (double& x : v) x = normal(gen);
            const Direction l = Direction::from(v);
            check_rotation_invariants(rotation_from_direction(l), l);
        }
    }
    // near-e1 stability
    const Direction near = Direction::from({1.0, 1e-13, -1e-13});
    check_rotation_invariants(rotation_from_direction(near), near);
}

TEST_CASE("rotation_from_direction rejects non-unit input") {
    std::array<double, kMaxDim> v{};
    v[0] = 0.9;
    CHECK_THROWS_AS(Direction(2, v), ValidationError);
}

TEST_CASE("build_box: single-site box") {
    const BoxSpec spec(Rotation::identity(2), 1.0, 1.0, 1.0);
    const LatticeBox box = build_box(spec, true);
    REQUIRE(box.interior.size() == 1);
    CHECK(box.interior[0] == Site::origin());
    CHECK(box.boundary_plus.size() == 1);
    CHECK(box.boundary_plus[0] == site2(1, 0));
    REQUIRE(box.boundary_other.size() == 3);
    std::set<Site> other(box.boundary_other.begin(), box.boundary_other.end());
    CHECK(other == std::set<Site>{site2(-1, 0), site2(0, 1), site2(0, -1)});
}

TEST_CASE("build_box: two-site box") {
    const BoxSpec spec(Rotation::identity(2), 1.0, 2.0, 1.0);
    const LatticeBox box = build_box(spec, true);
    REQUIRE(box.interior.size() == 2);
    CHECK(box.interior[0] == site2(0, 0));
    CHECK(box.interior[1] == site2(1, 0));
    REQUIRE(box.boundary_plus.size() == 1);
    CHECK(box.boundary_plus[0] == site2(2, 0));
}

TEST_CASE("build_box: criterion box site count at L = 6") {
    const BoxSpec spec = BoxSpec::criterion(Rotation::identity(2), 6.0, 18.0);
    CHECK(spec.neg_extent == doctest::Approx(4.0));
    CHECK(spec.pos_extent == doctest::Approx(8.0));
    const LatticeBox box = build_box(spec, true);
    // open rectangle (-4,8) x (-18,18): 11 * 35 lattice points
    CHECK(box.interior.size() == 385);
}

TEST_CASE("box specs reject nonpositive extents; tiny boxes keep the origin") {
    CHECK_THROWS_AS(BoxSpec(Rotation::identity(2), 0.5, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(BoxSpec(Rotation::identity(2), -1.0, 2.0, 1.0), ValidationError);
    const BoxSpec thin(Rotation::identity(2), 0.5, 0.5, 0.5);
    CHECK(build_box(thin, true).interior.size() == 1);  // only the origin
}

TEST_CASE("build_box: boundary partition invariants on random rotated boxes") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> ext(1.0, 6.0);
    for (int d = 2; d <= 3; ++d) {
        for (int rep = 0; rep < 12; ++rep) {
            std::vector<double> v(static_cast<std::size_t>(d));
            for (double& x : v) x = normal(gen);
            const Direction l = Direction::from(v);
            const BoxSpec spec(rotation_from_direction(l), ext(gen), ext(gen), ext(gen));
            LatticeBox box;
            try {
                box = build_box(spec);
            } catch (const ValidationError&) {
                continue;  // empty interior for tiny rotated boxes
            }
            std::set<Site> interior(box.interior.begin(), box.interior.end());
            std::set<Site> plus(box.boundary_plus.begin(), box.boundary_plus.end());
            std::set<Site> other(box.boundary_other.begin(), box.boundary_other.end());

            // disjoint and exhaustive
            for (const Site& s : plus) CHECK(other.count(s) == 0);
            for (const Site& s : plus) CHECK(interior.count(s) == 0);
            for (const Site& s : other) CHECK(interior.count(s) == 0);

            // neighbor closure: interior neighbors live in interior or boundary
            for (const Site& s : box.interior) {
                for (int k = 0; k < 2 * d; ++k) {
                    const Site nb = neighbor(s, k);
                    CHECK((interior.count(nb) || plus.count(nb) || other.count(nb)));
                }
            }
            // every boundary site is adjacent to some interior site
            for (const Site& s : plus) {
                bool adj = false;
                for (int k = 0; k < 2 * d; ++k) adj = adj || interior.count(neighbor(s, k)) > 0;
                CHECK(adj);
            }
            // boundary_plus lies at or beyond the positive face
            for (const Site& s : box.boundary_plus) {
                CHECK(l.dot_site(s) >= spec.pos_extent - 1e-9);
            }
            // determinism
            const LatticeBox again = build_box(spec);
            CHECK(again.interior == box.interior);
            CHECK(again.boundary_plus == box.boundary_plus);
            CHECK(again.boundary_other == box.boundary_other);
        }
    }
}

TEST_CASE("build_box: interior grows with extents") {
    const Direction l = Direction::from({3.0, 4.0});
    const Rotation r = rotation_from_direction(l);
    std::size_t prev = 0;
    for (double ext = 2.0; ext <= 8.0; ext += 2.0) {
        const LatticeBox box = build_box(BoxSpec(r, ext, ext, ext));
        CHECK(box.interior.size() >= prev);
        CHECK(box.interior.size() >= 1);
        prev = box.interior.size();
    }
}

TEST_CASE("slab_membership classifies inside, front, back") {
    const Slab slab(Direction::axis(2, 0), 1.0, 10.0);
    CHECK(slab_membership(slab, Site::origin()) == SlabPosition::inside);
    CHECK(slab_membership(slab, site2(10, 3)) == SlabPosition::exited_front);
    CHECK(slab_membership(slab, site2(-10, 0)) == SlabPosition::exited_back);

    const Slab half(Direction::axis(2, 0), 0.5, 10.0);
    CHECK(slab_membership(half, site2(-5, 0)) == SlabPosition::exited_back);
    CHECK(slab_membership(half, site2(-4, 0)) == SlabPosition::inside);
    CHECK_THROWS_AS(Slab(Direction::axis(2, 0), -1.0, 10.0), ValidationError);
}

TEST_CASE("build_renorm_boxes: d=2, beta=0.5, L=4 example") {
    const RenormBoxes rb = build_renorm_boxes(Direction::axis(2, 0), 0.5, 4.0, Site::origin());
    // B1 = [0,4] x [0,2]: 5 * 3 sites
    CHECK(rb.b1.size() == 15);
    // B2 = (-4,4] x (-4,6): first coordinate -3..4, second -3..5
    CHECK(rb.b2.interior.size() == 72);
    // star boundary: dB2 within B1 shifted by L e1 = [4,8] x [0,2]
    REQUIRE(rb.star_boundary.size() == 3);
    for (const Site& s : rb.star_boundary) {
        CHECK(s.c[0] == 5);
        CHECK(s.c[1] >= 0);
        CHECK(s.c[1] <= 2);
    }
    // B1 inside B2
    for (const Site& s : rb.b1) CHECK(rb.b2.is_interior(s));
}

TEST_CASE("build_renorm_boxes validates inputs") {
    CHECK_THROWS_AS(build_renorm_boxes(Direction::axis(2, 0), 1.2, 4.0, Site::origin()),
                    ValidationError);
    CHECK_THROWS_AS(build_renorm_boxes(Direction::axis(2, 0), 0.5, 0.25, Site::origin()),
                    ValidationError);
}

TEST_CASE("build_tile_boxes: chi and L0") {
    SUBCASE("beta0 = beta gives chi = 1 and a single segment") {
        const TileBoxes tb =
            build_tile_boxes(Direction::axis(2, 0), 0.75, 0.75, 1.0, 32.0, Site::origin());
        CHECK(tb.chi == doctest::Approx(1.0));
        CHECK(tb.L0 == doctest::Approx(32.0 - std::pow(32.0, 0.75)));
    }
    SUBCASE("beta0=0.6, beta=0.8, L=100, eta=1") {
        const TileBoxes tb =
            build_tile_boxes(Direction::axis(2, 0), 0.6, 0.8, 1.0, 100.0, Site::origin());
        CHECK(tb.chi == doctest::Approx(0.8));
        // floor(100^{0.2}) = 2, L0 = (100 - 100^{0.6}) / 2
        const double expect = (100.0 - std::pow(100.0, 0.6)) / 2.0;
        CHECK(tb.L0 == doctest::Approx(expect).epsilon(1e-12));
        CHECK(tb.L0 == doctest::Approx(42.0755).epsilon(1e-4));
    }
    SUBCASE("domain violations throw") {
        CHECK_THROWS_AS(build_tile_boxes(Direction::axis(2, 0), 0.8, 0.6, 1.0, 100.0, Site::origin()),
                        ValidationError);  // beta < beta0 (chi would leave (beta0, 1])
        CHECK_THROWS_AS(build_tile_boxes(Direction::axis(2, 0), 0.4, 0.5, 1.0, 100.0, Site::origin()),
                        ValidationError);  // beta0 <= 1/2
    }
    SUBCASE("scale too small") {
        CHECK_THROWS_AS(build_tile_boxes(Direction::axis(2, 0), 0.75, 0.75, 5.0, 8.0, Site::origin()),
                        ValidationError);  // L0 = 8 - 5*8^{0.75} < 1
    }
    SUBCASE("B1 sits inside B2 with the plus boundary on the forward face") {
        const TileBoxes tb =
            build_tile_boxes(Direction::axis(2, 0), 0.6, 0.7, 0.5, 20.0, Site::origin());
        for (const Site& s : tb.b1) CHECK(tb.b2.is_interior(s));
        CHECK(!tb.plus_boundary.empty());
        for (const Site& s : tb.plus_boundary) {
            CHECK(static_cast<double>(s.c[0]) >= tb.L0 - 1e-9);
        }
    }
}

TEST_CASE("as_region marks exactly the plus boundary as target") {
    const LatticeBox box = build_box(BoxSpec(Rotation::identity(2), 2.0, 3.0, 2.0), true);
    const Region region = as_region(box);
    CHECK(region.interior == box.interior);
    std::size_t n_target = 0;
    for (std::size_t b = 0; b < region.boundary.size(); ++b) {
        if (region.is_target[b]) {
            ++n_target;
            CHECK(std::binary_search(box.boundary_plus.begin(), box.boundary_plus.end(),
                                     region.boundary[b]));
        }
    }
    CHECK(n_target == box.boundary_plus.size());
}

TEST_CASE("validate_criterion_spec enforces the structural constraints") {
    const Rotation r = Rotation::identity(2);
    CHECK_NOTHROW(validate_criterion_spec(BoxSpec::criterion(r, 6.0, 18.0), 5.0));
    CHECK_THROWS_AS(validate_criterion_spec(BoxSpec::criterion(r, 4.0, 12.0), 5.0),
                    ValidationError);  // L < c2
    CHECK_THROWS_AS(validate_criterion_spec(BoxSpec::criterion(r, 6.0, 2.0), 5.0),
                    ValidationError);  // Ltilde < 3 sqrt(d)
    CHECK_THROWS_AS(validate_criterion_spec(BoxSpec::criterion(r, 6.0, 300.0), 5.0),
                    ValidationError);  // Ltilde >= L^3
    CHECK_THROWS_AS(validate_criterion_spec(BoxSpec(r, 4.0, 9.0, 18.0), 5.0),
                    ValidationError);  // pos != neg + 4
}
