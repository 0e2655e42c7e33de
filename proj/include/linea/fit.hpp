#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "linea/summation.hpp"

namespace linea {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double residual_rms = 0.0;
};

/// Ordinary least-squares line through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit f;
    if (n < 2 || y.size() != n) return f;
    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    KahanSum sxx, sxy;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx.value() == 0.0) return f;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    KahanSum ssr, sst;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ssr += e * e;
        sst += (y[i] - my) * (y[i] - my);
    }
    f.residual_rms = std::sqrt(ssr.value() / static_cast<double>(n));
    f.r_squared = (sst.value() > 0.0) ? 1.0 - ssr.value() / sst.value() : 1.0;
    return f;
}

} // namespace linea
