#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/rotation.hpp"

namespace rwre {

/// Rotated box specification: the lattice box is
///   B = { x in Z^d : R^T x in (-neg_extent, pos_extent) x (-transverse, transverse)^{d-1} }.
struct BoxSpec {
    Rotation rotation;
    double neg_extent = 0.0;
    double pos_extent = 0.0;
    double transverse = 0.0;

    BoxSpec() = default;
    BoxSpec(Rotation r, double neg, double pos, double trans);  // validates extents > 0

    int dim() const { return rotation.dim(); }

    /// Effective-criterion box of scale L: extents (L-2, L+2, Ltilde).
    static BoxSpec criterion(const Rotation& r, double L, double Ltilde);
    /// Scale parameter L of a criterion box.
    double scale() const { return neg_extent + 2.0; }
};

/// Structural constraints a criterion box specification must satisfy:
/// pos = neg + 4, neg + 2 >= c2, 3*sqrt(d) <= transverse < (neg+2)^3.
void validate_criterion_spec(const BoxSpec& spec, double c2);

struct LatticeBox {
    BoxSpec spec;
    std::vector<Site> interior;        // lexicographic order
    std::vector<Site> boundary_plus;   // lexicographic order
    std::vector<Site> boundary_other;  // lexicographic order

    std::unordered_map<Site, std::int32_t, SiteHasher> interior_index;

    bool is_interior(const Site& s) const { return interior_index.count(s) != 0; }
};

/// Realizes a box specification. Throws if the interior is empty, or when
/// `require_origin` and the origin is not an interior site.
LatticeBox build_box(const BoxSpec& spec, bool require_origin = false);

struct Slab {
    Direction direction;  // l'
    double b = 0.0;
    double L = 0.0;

    Slab(Direction l_prime, double b_, double L_);
};

enum class SlabPosition { inside, exited_front, exited_back };

/// inside iff -bL < x.l' < L; front iff x.l' >= L; back iff x.l' <= -bL.
SlabPosition slab_membership(const Slab& slab, const Site& x);

/// Generic exit-problem substrate: a finite interior with its full distance-1
/// boundary, a designated target subset of the boundary marked per site.
struct Region {
    int d = 0;
    std::vector<Site> interior;       // lexicographic order
    std::vector<Site> boundary;       // lexicographic order
    std::vector<std::uint8_t> is_target;  // parallel to boundary

    std::unordered_map<Site, std::int32_t, SiteHasher> interior_index;
    std::unordered_map<Site, std::int32_t, SiteHasher> boundary_index;

    bool is_interior(const Site& s) const { return interior_index.count(s) != 0; }
};

/// Region view of a lattice box with target set = boundary_plus.
Region as_region(const LatticeBox& box);

/// Renormalization box pair around anchor w:
///   B1 = R(w + [0,L] x [0,L^beta]^{d-1}),
///   B2 = R(w + (-dL^beta, L] x (-dL^beta, (d+1)L^beta)^{d-1}),
///   star boundary = dB2 intersect B1(w + L e1).
struct RenormBoxes {
    Site anchor;
    double beta = 0.0;
    double L = 0.0;
    Rotation rotation;
    std::vector<Site> b1;             // realized B1 sites
    Region b2;                        // target marks the star boundary
    std::vector<Site> star_boundary;  // lexicographic order
};

RenormBoxes build_renorm_boxes(const Direction& vhat, double beta, double L, const Site& w);

/// Tile boxes of the seed estimate, anchored at w:
///   chi = beta0 + 1 - beta, L0 = (L - eta L^{beta0}) / floor(L^{1-chi}),
///   B~1 = R(w + [0,L0] x [0,L^{beta0}]^{d-1}),
///   B~2 = R(w + (-dL^{beta0}, L0] x (-eta L^{beta0}, (1+eta)L^{beta0})^{d-1}).
struct TileBoxes {
    Site anchor;
    double beta0 = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double L = 0.0;
    double chi = 0.0;
    double L0 = 0.0;
    Rotation rotation;
    std::vector<Site> b1;
    Region b2;                       // target marks the plus boundary
    std::vector<Site> plus_boundary;
};

TileBoxes build_tile_boxes(const Direction& vhat, double beta0, double beta, double eta,
                           double L, const Site& w);

}  // namespace rwre
