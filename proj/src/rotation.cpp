#include "rwre/rotation.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

void check_dim(int d) {
    if (d < 2 || d > kMaxDim) {
        throw ValidationError("dimension must be in [2," + std::to_string(kMaxDim) +
                              "], got " + std::to_string(d));
    }
}

// Determinant by Gaussian elimination with partial pivoting; d <= kMaxDim.
double det_dense(int d, std::vector<double> a) {
    double det = 1.0;
    for (int k = 0; k < d; ++k) {
        int piv = k;
        for (int i = k + 1; i < d; ++i) {
            if (std::abs(a[static_cast<std::size_t>(i) * d + k]) >
                std::abs(a[static_cast<std::size_t>(piv) * d + k])) {
                piv = i;
            }
        }
        if (a[static_cast<std::size_t>(piv) * d + k] == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < d; ++j) {
                std::swap(a[static_cast<std::size_t>(piv) * d + j],
                          a[static_cast<std::size_t>(k) * d + j]);
            }
            det = -det;
        }
        const double pivot = a[static_cast<std::size_t>(k) * d + k];
        det *= pivot;
        for (int i = k + 1; i < d; ++i) {
            const double f = a[static_cast<std::size_t>(i) * d + k] / pivot;
            for (int j = k; j < d; ++j) {
                a[static_cast<std::size_t>(i) * d + j] -= f * a[static_cast<std::size_t>(k) * d + j];
            }
        }
    }
    return det;
}

}  // namespace

Direction::Direction(int dim, std::array<double, kMaxDim> coords) : d(dim), v(coords) {
    check_dim(d);
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) norm2 += v[i] * v[i];
    for (int i = d; i < kMaxDim; ++i) {
        if (v[i] != 0.0) throw ValidationError("direction has nonzero coordinate beyond dimension");
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
        throw ValidationError("direction is not a unit vector");
    }
}

Direction Direction::axis(int dim, int axis_index, double sign) {
    check_dim(dim);
    if (axis_index < 0 || axis_index >= dim) throw ValidationError("axis index out of range");
    std::array<double, kMaxDim> v{};
    v[axis_index] = sign;
    return Direction(dim, v);
}

Direction Direction::from(const std::vector<double>& coords) {
    const int d = static_cast<int>(coords.size());
    check_dim(d);
    double norm2 = 0.0;
    for (double x : coords) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw ValidationError("cannot normalize the zero vector");
    std::array<double, kMaxDim> v{};
    for (int i = 0; i < d; ++i) v[i] = coords[static_cast<std::size_t>(i)] / norm;
    return Direction(d, v);
}

Rotation::Rotation(int d, std::vector<double> row_major) : d_(d), m_(std::move(row_major)) {
    check_dim(d_);
    if (m_.size() != static_cast<std::size_t>(d_) * d_) {
        throw ValidationError("rotation matrix has wrong size");
    }
    // Orthogonality: R^T R = I entrywise.
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d_; ++k) acc += at(k, i) * at(k, j);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(acc - want) > 1e-10) {
                throw ValidationError("rotation matrix is not orthogonal");
            }
        }
    }
    if (std::abs(det_dense(d_, m_) - 1.0) > 1e-10) {
        throw ValidationError("rotation matrix does not have determinant +1");
    }
}

std::array<double, kMaxDim> Rotation::apply(const std::array<double, kMaxDim>& y) const {
    std::array<double, kMaxDim> x{};
    for (int i = 0; i < d_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d_; ++j) acc += at(i, j) * y[j];
        x[i] = acc;
    }
    return x;
}

std::array<double, kMaxDim> Rotation::apply_transpose(const std::array<double, kMaxDim>& y) const {
    std::array<double, kMaxDim> x{};
    for (int i = 0; i < d_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d_; ++j) acc += at(j, i) * y[j];
        x[i] = acc;
    }
    return x;
}

std::array<double, kMaxDim> Rotation::frame_coords(const Site& s) const {
    std::array<double, kMaxDim> x{};
    for (int i = 0; i < d_; ++i) x[i] = static_cast<double>(s.c[i]);
    return apply_transpose(x);
}

Direction Rotation::first_column() const { return column(0); }

Direction Rotation::column(int j) const {
    std::array<double, kMaxDim> v{};
    for (int i = 0; i < d_; ++i) v[i] = at(i, j);
    return Direction(d_, v);
}

Rotation Rotation::identity(int d) {
    check_dim(d);
    std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + i] = 1.0;
    return Rotation(d, std::move(m));
}

Rotation rotation_from_direction(const Direction& l) {
    const int d = l.d;
    if (d == 2) {
        // Unique proper rotation sending e1 to l.
        return Rotation(2, {l.v[0], -l.v[1], l.v[1], l.v[0]});
    }
    std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
    // Householder H = I - 2 vv^T/(v.v). With v = l + e1 (stable for l1 >= 0)
    // H maps e1 to -l; with v = l - e1 (stable for l1 < 0) it maps e1 to l.
    // Either way det H = -1 and one column flip restores det +1 while keeping
    // the first column equal to l.
    const bool via_sum = l.v[0] >= 0.0;
    std::array<double, kMaxDim> w = l.v;
    w[0] += via_sum ? 1.0 : -1.0;
    double ww = 0.0;
    for (int i = 0; i < d; ++i) ww += w[i] * w[i];  // >= 2 by the sign choice
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            m[static_cast<std::size_t>(i) * d + j] = id - 2.0 * w[i] * w[j] / ww;
        }
    }
    const int flip_col = via_sum ? 0 : d - 1;
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + flip_col] *= -1.0;
    return Rotation(d, std::move(m));
}

}  // namespace rwre
