#include "rwre/stats.hpp"

#include <cmath>
#include <limits>

#include "rwre/errors.hpp"

namespace rwre {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanCi mean_ci(std::span<const double> values) {
    MeanCi out;
    out.n = static_cast<long>(values.size());
    if (out.n == 0) throw ValidationError("mean of an empty sample");
    out.mean = pairwise_sum(values) / static_cast<double>(out.n);
    if (out.n == 1) return out;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(out.n - 1);
    out.sd = std::sqrt(var);
    out.ci_half_width = 1.959963984540054 * out.sd / std::sqrt(static_cast<double>(out.n));
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    LineFit fit;
    if (x.size() != y.size()) throw ValidationError("fit_line needs equal-length inputs");
    const int n = static_cast<int>(x.size());
    fit.n_used = n;
    if (n < 2) return fit;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += x[static_cast<std::size_t>(i)];
        sy += y[static_cast<std::size_t>(i)];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[static_cast<std::size_t>(i)] - mx;
        sxx += dx * dx;
        sxy += dx * (y[static_cast<std::size_t>(i)] - my);
    }
    if (sxx == 0.0) return fit;  // degenerate abscissa
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n == 2) {
        fit.slope_se = std::numeric_limits<double>::infinity();
    } else {
        double rss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = y[static_cast<std::size_t>(i)] -
                             (fit.intercept + fit.slope * x[static_cast<std::size_t>(i)]);
            rss += r * r;
        }
        fit.slope_se = std::sqrt(rss / (n - 2) / sxx);
    }
    fit.available = true;
    return fit;
}

}  // namespace rwre
