#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "linea/polynomial.hpp"
#include "linea/summation.hpp"

namespace linea {

/// Truncated power series sum a_n z^n, n = 0..truncation_order().
struct PowerSeries {
    std::vector<cplx> coeffs;

    PowerSeries() = default;
    explicit PowerSeries(std::vector<cplx> c) : coeffs(std::move(c)) {}
    explicit PowerSeries(int order) : coeffs(static_cast<std::size_t>(order) + 1, cplx(0.0)) {}

    int truncation_order() const { return static_cast<int>(coeffs.size()) - 1; }

    cplx eval(cplx z) const {
        cplx v(0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * z + *it;
        return v;
    }

    /// Value and termwise derivative at z, one Horner pass.
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const {
        cplx v(0.0), d(0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            d = d * z + v;
            v = v * z + *it;
        }
        return {v, d};
    }
};

/// (a*b) truncated at `order`. Convolutions are short (order <= a few hundred),
/// so the quadratic algorithm with compensated inner sums is fine.
inline PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b, int order) {
    PowerSeries out(order);
    for (int n = 0; n <= order; ++n) {
        KahanSumC acc;
        int lo = std::max(0, n - b.truncation_order());
        int hi = std::min(n, a.truncation_order());
        for (int k = lo; k <= hi; ++k) acc += a.coeffs[k] * b.coeffs[n - k];
        out.coeffs[n] = acc.value();
    }
    return out;
}

/// p(s(z)) truncated at `order`, via Horner in the series ring.
inline PowerSeries poly_compose_series(const Polynomial& p, const PowerSeries& s, int order) {
    PowerSeries acc(order);
    acc.coeffs[0] = p.coeffs.back();
    for (int k = p.degree() - 1; k >= 0; --k) {
        acc = series_mul(acc, s, order);
        acc.coeffs[0] += p.coeffs[static_cast<std::size_t>(k)];
    }
    return acc;
}

} // namespace linea
