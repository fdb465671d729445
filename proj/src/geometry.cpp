#include "rwre/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

// Inclusion tolerance applied to closed range ends only; open ends compare strictly.
constexpr double kMemberTol = 1e-9;

// Axis-aligned box in the rotated frame: a site x belongs iff
// (R^T x)_i - shift_i lies in [lo_i, hi_i] with per-end open/closed flags.
struct FrameBox {
    const Rotation* rotation = nullptr;
    std::array<double, kMaxDim> shift{};
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    std::array<bool, kMaxDim> lo_closed{};
    std::array<bool, kMaxDim> hi_closed{};

    int dim() const { return rotation->dim(); }

    bool contains(const Site& x) const {
        const auto y = rotation->frame_coords(x);
        const int d = dim();
        for (int i = 0; i < d; ++i) {
            const double t = y[i] - shift[i];
            if (lo_closed[i] ? (t < lo[i] - kMemberTol) : (t <= lo[i])) return false;
            if (hi_closed[i] ? (t > hi[i] + kMemberTol) : (t >= hi[i])) return false;
        }
        return true;
    }
};

// Integer bounding ranges of the rotated frame box, per lattice axis.
void bounding_ranges(const FrameBox& fb, std::array<std::int64_t, kMaxDim>& lo_out,
                     std::array<std::int64_t, kMaxDim>& hi_out) {
    const int d = fb.dim();
    const Rotation& r = *fb.rotation;
    for (int j = 0; j < d; ++j) {
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < d; ++i) {
            const double a = r.at(j, i) * (fb.shift[i] + fb.lo[i]);
            const double b = r.at(j, i) * (fb.shift[i] + fb.hi[i]);
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        lo_out[j] = static_cast<std::int64_t>(std::ceil(lo - 1e-6));
        hi_out[j] = static_cast<std::int64_t>(std::floor(hi + 1e-6));
    }
}

// All member sites in lexicographic order.
std::vector<Site> realize(const FrameBox& fb) {
    const int d = fb.dim();
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    bounding_ranges(fb, lo, hi);
    std::vector<Site> out;
    Site cur{};
    for (int i = 0; i < d; ++i) cur.c[i] = static_cast<std::int32_t>(lo[i]);
    for (;;) {
        if (fb.contains(cur)) out.push_back(cur);
        int axis = d - 1;
        while (axis >= 0) {
            if (cur.c[axis] < hi[axis]) {
                ++cur.c[axis];
                break;
            }
            cur.c[axis] = static_cast<std::int32_t>(lo[axis]);
            --axis;
        }
        if (axis < 0) break;
    }
    return out;
}

// Distance-1 boundary (1-norm) of a realized site set, lexicographic order.
std::vector<Site> boundary_of(const std::vector<Site>& sites, int d) {
    std::unordered_set<Site, SiteHasher> inside(sites.begin(), sites.end());
    std::unordered_set<Site, SiteHasher> seen;
    std::vector<Site> out;
    for (const Site& s : sites) {
        for (int k = 0; k < 2 * d; ++k) {
            const Site nb = neighbor(s, k);
            if (!inside.count(nb) && seen.insert(nb).second) out.push_back(nb);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Region make_region(int d, std::vector<Site> interior, std::vector<Site> boundary,
                   const std::unordered_set<Site, SiteHasher>& target) {
    Region reg;
    reg.d = d;
    reg.interior = std::move(interior);
    reg.boundary = std::move(boundary);
    reg.is_target.resize(reg.boundary.size(), 0);
    reg.interior_index.reserve(reg.interior.size());
    for (std::size_t i = 0; i < reg.interior.size(); ++i) {
        reg.interior_index.emplace(reg.interior[i], static_cast<std::int32_t>(i));
    }
    reg.boundary_index.reserve(reg.boundary.size());
    for (std::size_t i = 0; i < reg.boundary.size(); ++i) {
        reg.boundary_index.emplace(reg.boundary[i], static_cast<std::int32_t>(i));
        if (target.count(reg.boundary[i])) reg.is_target[i] = 1;
    }
    return reg;
}

}  // namespace

BoxSpec::BoxSpec(Rotation r, double neg, double pos, double trans)
    : rotation(std::move(r)), neg_extent(neg), pos_extent(pos), transverse(trans) {
    if (!(neg_extent > 0.0) || !(pos_extent > 0.0) || !(transverse > 0.0)) {
        throw ValidationError("box extents must be strictly positive");
    }
}

BoxSpec BoxSpec::criterion(const Rotation& r, double L, double Ltilde) {
    if (!(L > 2.0)) throw ValidationError("criterion box needs L > 2");
    return BoxSpec(r, L - 2.0, L + 2.0, Ltilde);
}

void validate_criterion_spec(const BoxSpec& spec, double c2) {
    const int d = spec.dim();
    const double L = spec.scale();
    if (std::abs(spec.pos_extent - (spec.neg_extent + 4.0)) > 1e-12) {
        throw ValidationError("criterion box must have pos_extent = neg_extent + 4");
    }
    if (L < c2) throw ValidationError("criterion box scale below c2");
    if (spec.transverse < 3.0 * std::sqrt(static_cast<double>(d)) ||
        !(spec.transverse < L * L * L)) {
        throw ValidationError("criterion box transverse extent outside [3 sqrt(d), L^3)");
    }
}

LatticeBox build_box(const BoxSpec& spec, bool require_origin) {
    const int d = spec.dim();
    FrameBox fb;
    fb.rotation = &spec.rotation;
    fb.lo[0] = -spec.neg_extent;
    fb.hi[0] = spec.pos_extent;
    for (int i = 1; i < d; ++i) {
        fb.lo[i] = -spec.transverse;
        fb.hi[i] = spec.transverse;
    }
    // all ends open

    LatticeBox box;
    box.spec = spec;
    box.interior = realize(fb);
    if (box.interior.empty()) throw ValidationError("box interior is empty");
    if (require_origin &&
        !std::binary_search(box.interior.begin(), box.interior.end(), Site::origin())) {
        throw ValidationError("origin is not an interior site of the box");
    }

    const std::vector<Site> bd = boundary_of(box.interior, d);
    for (const Site& x : bd) {
        const auto y = spec.rotation.frame_coords(x);
        bool plus = y[0] >= spec.pos_extent - kMemberTol;
        for (int i = 1; plus && i < d; ++i) {
            if (std::abs(y[i]) > spec.transverse + kMemberTol) plus = false;
        }
        (plus ? box.boundary_plus : box.boundary_other).push_back(x);
    }
    box.interior_index.reserve(box.interior.size());
    for (std::size_t i = 0; i < box.interior.size(); ++i) {
        box.interior_index.emplace(box.interior[i], static_cast<std::int32_t>(i));
    }
    return box;
}

Slab::Slab(Direction l_prime, double b_, double L_) : direction(std::move(l_prime)), b(b_), L(L_) {
    if (!(b > 0.0) || !(L > 0.0)) throw ValidationError("slab requires b > 0 and L > 0");
}

SlabPosition slab_membership(const Slab& slab, const Site& x) {
    const double proj = slab.direction.dot_site(x);
    if (proj >= slab.L) return SlabPosition::exited_front;
    if (proj <= -slab.b * slab.L) return SlabPosition::exited_back;
    return SlabPosition::inside;
}

Region as_region(const LatticeBox& box) {
    std::unordered_set<Site, SiteHasher> target(box.boundary_plus.begin(),
                                                box.boundary_plus.end());
    std::vector<Site> bd;
    bd.reserve(box.boundary_plus.size() + box.boundary_other.size());
    bd.insert(bd.end(), box.boundary_plus.begin(), box.boundary_plus.end());
    bd.insert(bd.end(), box.boundary_other.begin(), box.boundary_other.end());
    std::sort(bd.begin(), bd.end());
    return make_region(box.spec.dim(), box.interior, std::move(bd), target);
}

RenormBoxes build_renorm_boxes(const Direction& vhat, double beta, double L, const Site& w) {
    if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("renorm boxes need beta in (0,1)");
    if (!(L >= 1.0)) throw ValidationError("renorm boxes need L >= 1");
    const int d = vhat.d;
    const Rotation rot = rotation_from_direction(vhat);
    const double lb = std::pow(L, beta);

    std::array<double, kMaxDim> shift{};
    for (int i = 0; i < d; ++i) shift[i] = static_cast<double>(w.c[i]);

    FrameBox b1;
    b1.rotation = &rot;
    b1.shift = shift;
    b1.lo[0] = 0.0;
    b1.hi[0] = L;
    b1.lo_closed[0] = b1.hi_closed[0] = true;
    for (int i = 1; i < d; ++i) {
        b1.lo[i] = 0.0;
        b1.hi[i] = lb;
        b1.lo_closed[i] = b1.hi_closed[i] = true;
    }

    FrameBox b2 = b1;
    b2.lo[0] = -d * lb;
    b2.hi[0] = L;
    b2.lo_closed[0] = false;
    b2.hi_closed[0] = true;
    for (int i = 1; i < d; ++i) {
        b2.lo[i] = -d * lb;
        b2.hi[i] = (d + 1) * lb;
        b2.lo_closed[i] = b2.hi_closed[i] = false;
    }

    RenormBoxes rb;
    rb.anchor = w;
    rb.beta = beta;
    rb.L = L;
    rb.rotation = rot;
    rb.b1 = realize(b1);
    if (rb.b1.empty()) throw ValidationError("renorm box B1 is empty");

    std::vector<Site> b2_sites = realize(b2);
    std::vector<Site> b2_boundary = boundary_of(b2_sites, d);

    // star boundary = dB2 intersect B1 shifted forward by L e1
    FrameBox b1_shifted = b1;
    b1_shifted.shift[0] += L;
    std::unordered_set<Site, SiteHasher> star;
    for (const Site& x : b2_boundary) {
        if (b1_shifted.contains(x)) star.insert(x);
    }
    rb.star_boundary.assign(star.begin(), star.end());
    std::sort(rb.star_boundary.begin(), rb.star_boundary.end());
    rb.b2 = make_region(d, std::move(b2_sites), std::move(b2_boundary), star);
    return rb;
}

TileBoxes build_tile_boxes(const Direction& vhat, double beta0, double beta, double eta,
                           double L, const Site& w) {
    if (!(beta0 > 0.5 && beta0 < 1.0) || !(beta >= beta0 && beta < 1.0)) {
        throw ValidationError("tile boxes need 1/2 < beta0 <= beta < 1");
    }
    if (!(eta > 0.0)) throw ValidationError("tile boxes need eta > 0");
    const int d = vhat.d;
    const double chi = beta0 + 1.0 - beta;
    if (!(chi > beta0 && chi <= 1.0 + 1e-12)) {
        throw ValidationError("tile parameter chi = beta0 + 1 - beta outside (beta0, 1]");
    }
    const double lb0 = std::pow(L, beta0);
    const double segments = std::floor(std::pow(L, 1.0 - chi));
    if (!(segments >= 1.0)) throw ValidationError("scale too small");
    const double L0 = (L - eta * lb0) / segments;
    if (!(L0 >= 1.0)) throw ValidationError("scale too small");

    const Rotation rot = rotation_from_direction(vhat);
    std::array<double, kMaxDim> shift{};
    for (int i = 0; i < d; ++i) shift[i] = static_cast<double>(w.c[i]);

    FrameBox b1;
    b1.rotation = &rot;
    b1.shift = shift;
    b1.lo[0] = 0.0;
    b1.hi[0] = L0;
    b1.lo_closed[0] = b1.hi_closed[0] = true;
    for (int i = 1; i < d; ++i) {
        b1.lo[i] = 0.0;
        b1.hi[i] = lb0;
        b1.lo_closed[i] = b1.hi_closed[i] = true;
    }

    FrameBox b2 = b1;
    b2.lo[0] = -d * lb0;
    b2.hi[0] = L0;
    b2.lo_closed[0] = false;
    b2.hi_closed[0] = true;
    for (int i = 1; i < d; ++i) {
        b2.lo[i] = -eta * lb0;
        b2.hi[i] = (1.0 + eta) * lb0;
        b2.lo_closed[i] = b2.hi_closed[i] = false;
    }

    TileBoxes tb;
    tb.anchor = w;
    tb.beta0 = beta0;
    tb.beta = beta;
    tb.eta = eta;
    tb.L = L;
    tb.chi = chi;
    tb.L0 = L0;
    tb.rotation = rot;
    tb.b1 = realize(b1);
    if (tb.b1.empty()) throw ValidationError("tile box B1 is empty");

    std::vector<Site> b2_sites = realize(b2);
    std::vector<Site> b2_boundary = boundary_of(b2_sites, d);

    // plus boundary: forward face of B~2 within its closed transverse ranges
    std::unordered_set<Site, SiteHasher> plus;
    for (const Site& x : b2_boundary) {
        const auto y = rot.frame_coords(x);
        if (y[0] - shift[0] < L0 - kMemberTol) continue;
        bool ok = true;
        for (int i = 1; ok && i < d; ++i) {
            const double t = y[i] - shift[i];
            if (t < -eta * lb0 - kMemberTol || t > (1.0 + eta) * lb0 + kMemberTol) ok = false;
        }
        if (ok) plus.insert(x);
    }
    tb.plus_boundary.assign(plus.begin(), plus.end());
    std::sort(tb.plus_boundary.begin(), tb.plus_boundary.end());
    tb.b2 = make_region(d, std::move(b2_sites), std::move(b2_boundary), plus);
    return tb;
}

}  // namespace rwre
