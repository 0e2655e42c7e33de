#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "linea/errors.hpp"
#include "linea/summation.hpp"

namespace linea {

/// Complex polynomial in one variable, coefficients in ascending degree.
/// Invariant: the leading coefficient is nonzero and degree() == coeffs.size()-1.
struct Polynomial {
    std::vector<cplx> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> c) : coeffs(std::move(c)) { trim(); }

    static Polynomial from_real(std::initializer_list<double> c) {
        std::vector<cplx> v;
        for (double x : c) v.emplace_back(x, 0.0);
        return Polynomial(std::move(v));
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    cplx leading() const { return coeffs.back(); }

    /// Largest coefficient magnitude; the residual scale used by the root finder.
    double scale() const {
        double s = 0.0;
        for (const cplx& c : coeffs) s = std::max(s, std::abs(c));
        return s;
    }

    Polynomial derivative() const {
        if (coeffs.size() <= 1) return Polynomial({cplx(0.0)});
        std::vector<cplx> d(coeffs.size() - 1);
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            d[k - 1] = coeffs[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

private:
    void trim() {
        while (coeffs.size() > 1 && coeffs.back() == cplx(0.0)) coeffs.pop_back();
        if (coeffs.empty()) coeffs.push_back(cplx(0.0));
    }
};

/// Horner evaluation of p and p' in one pass.
inline std::pair<cplx, cplx> poly_eval(const Polynomial& p, cplx z) {
    cplx v(0.0), d(0.0);
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
        d = d * z + v;
        v = v * z + *it;
    }
    return {v, d};
}

inline cplx poly_value(const Polynomial& p, cplx z) {
    cplx v(0.0);
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) v = v * z + *it;
    return v;
}

/// Expand lead * prod (z - r_i) back into coefficient form.
inline Polynomial poly_from_roots(cplx lead, const std::vector<cplx>& roots) {
    std::vector<cplx> c{lead};
    for (const cplx& r : roots) {
        c.push_back(cplx(0.0));
        for (std::size_t k = c.size() - 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
        c[0] = -r * c[0];
    }
    return Polynomial(std::move(c));
}

} // namespace linea
