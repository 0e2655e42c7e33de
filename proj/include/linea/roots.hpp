#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "linea/errors.hpp"
#include "linea/polynomial.hpp"

namespace linea {

namespace detail {

inline bool root_order(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace detail

/// All roots of p (with multiplicity), found by Aberth-Ehrlich simultaneous
/// iteration from equispaced initial guesses on a circle enclosing every root,
/// then polished with a few Newton steps. Roots come back sorted by
/// (real, imaginary) so downstream traversals are deterministic.
///
/// Throws NonConvergence if the residual |p(r)| does not drop below
/// tol * scale(p) for every root within the iteration cap.
inline std::vector<cplx> poly_roots(const Polynomial& p, double tol = 1e-12,
                                    int max_iter = 200) {
    const int n = p.degree();
    if (n < 1) throw NonConvergence("poly_roots: degree must be >= 1");
    if (n == 1) return {-p.coeffs[0] / p.coeffs[1]};

    const double scale = p.scale();
    const cplx lead = p.leading();

    double coeff_max = 0.0;
    for (int k = 0; k < n; ++k) coeff_max = std::max(coeff_max, std::abs(p.coeffs[k]));
    const double radius = 1.0 + coeff_max / std::abs(lead);

    // Slightly irrational angular offset so no guess starts on a symmetry axis.
    std::vector<cplx> z(n);
    const double offset = 0.376991118430775;
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * M_PI * k / n + offset;
        z[k] = radius * cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<cplx> w(n);
    bool done = false;
    for (int iter = 0; iter < max_iter && !done; ++iter) {
        done = true;
        for (int k = 0; k < n; ++k) {
            auto [v, d] = poly_eval(p, z[k]);
            if (std::abs(v) < tol * scale) {
                w[k] = cplx(0.0);
                continue;
            }
            cplx ratio = (d != cplx(0.0)) ? v / d : cplx(0.0);
            cplx sum(0.0);
            for (int j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            cplx denom = 1.0 - ratio * sum;
            w[k] = (denom != cplx(0.0)) ? ratio / denom : ratio;
            if (std::abs(w[k]) > tol * (1.0 + std::abs(z[k]))) done = false;
        }
        for (int k = 0; k < n; ++k) z[k] -= w[k];
    }

    // Newton polish; cheap and sharpens simple roots to machine precision.
    for (int k = 0; k < n; ++k) {
        for (int it = 0; it < 8; ++it) {
            auto [v, d] = poly_eval(p, z[k]);
            if (std::abs(v) <= tol * scale * 0.01 || d == cplx(0.0)) break;
            z[k] -= v / d;
        }
    }

    for (int k = 0; k < n; ++k) {
        if (!(std::abs(poly_value(p, z[k])) < tol * scale))
            throw NonConvergence("poly_roots: residual above tolerance; ill-conditioned input");
    }

    std::sort(z.begin(), z.end(), detail::root_order);
    return z;
}

} // namespace linea
