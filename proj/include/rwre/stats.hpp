#pragma once

#include <span>
#include <vector>

namespace rwre {

/// Pairwise (cascade) summation: deterministic for a fixed operand order and
/// with O(log n) error growth, so parallel fills reduce identically.
double pairwise_sum(std::span<const double> values);

struct MeanCi {
    long n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double ci_half_width = 0.0;  // 95%, normal approximation
};

MeanCi mean_ci(std::span<const double> values);

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
    bool available = false;
    int n_used = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // infinite when n_used == 2
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace rwre
