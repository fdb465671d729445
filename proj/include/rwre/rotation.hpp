#pragma once

#include <array>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

/// Unit vector of S^{d-1}.
struct Direction {
    int d = 0;
    std::array<double, kMaxDim> v{};

    Direction() = default;
    Direction(int dim, std::array<double, kMaxDim> coords);  // validates |v| = 1

    static Direction axis(int dim, int axis_index, double sign = 1.0);
    static Direction from(const std::vector<double>& coords);  // normalizes

    double dot_site(const Site& s) const {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += v[i] * static_cast<double>(s.c[i]);
        return acc;
    }
};

/// Proper rotation of R^d, stored row-major. First column is the generating
/// direction l, so columns are the rotated frame axes R(e_i).
class Rotation {
public:
    Rotation() = default;
    Rotation(int d, std::vector<double> row_major);  // validates orthogonality, det +1

    int dim() const { return d_; }
    double at(int row, int col) const { return m_[static_cast<std::size_t>(row) * d_ + col]; }
    const std::vector<double>& row_major() const { return m_; }

    // x = R y (frame coordinates y to lattice coordinates x).
    std::array<double, kMaxDim> apply(const std::array<double, kMaxDim>& y) const;
    // y = R^T x.
    std::array<double, kMaxDim> apply_transpose(const std::array<double, kMaxDim>& y) const;
    std::array<double, kMaxDim> frame_coords(const Site& s) const;

    Direction first_column() const;
    Direction column(int j) const;

    static Rotation identity(int d);

private:
    int d_ = 0;
    std::vector<double> m_;
};

/// Deterministic proper rotation with R(e1) = l. Explicit 2x2 rotation for
/// d = 2; sign-stable Householder construction for d >= 3.
Rotation rotation_from_direction(const Direction& l);

}  // namespace rwre
