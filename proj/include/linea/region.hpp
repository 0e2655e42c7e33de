#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include "linea/polynomial.hpp"

namespace linea {

/// Target sets K for area integrals and restrictions. Membership is total:
/// every point gets a verdict.
struct DiscRegion {
    cplx center;
    double radius = 0.0;
};

/// The ray {anchor + s*direction : s >= 0}; a measure-zero set, membership
/// means lying on the ray within `tol`.
struct HalfLineRegion {
    cplx anchor;
    cplx direction;
    double tol = 1e-9;
};

struct PolygonRegion {
    std::vector<cplx> vertices;  // simple, closed (last edge wraps to first)
};

/// Filled Julia set of p by escape-time test; iteration-cap-undecided counts
/// as inside (conservative for area lower bounds).
struct FilledJuliaRegion {
    Polynomial p;
    int max_iter = 256;
    double escape_radius = 0.0;  // 0 = derive from coefficients
};

/// Escape radius R with |z| > R  =>  |p(z)| >= 2|z|.
inline double default_escape_radius(const Polynomial& p) {
    double s = 0.0;
    for (int k = 0; k + 1 < static_cast<int>(p.coeffs.size()); ++k)
        s += std::abs(p.coeffs[static_cast<std::size_t>(k)]);
    double r = (2.0 + s) / std::abs(p.leading());
    return std::max(2.0, r);
}

/// Orbit of z stays bounded for max_iter steps (undecided-at-cap counts as
/// inside).
inline bool in_filled_julia(const Polynomial& p, cplx z, int max_iter, double escape_radius) {
    cplx w = z;
    for (int i = 0; i < max_iter; ++i) {
        if (std::abs(w) > escape_radius) return false;
        w = poly_value(p, w);
    }
    return std::abs(w) <= escape_radius;
}

struct RegionSpec {
    std::variant<DiscRegion, HalfLineRegion, PolygonRegion, FilledJuliaRegion> shape;

    static RegionSpec disc(cplx center, double radius) {
        return {DiscRegion{center, radius}};
    }
    static RegionSpec half_line(cplx anchor, cplx direction, double tol = 1e-9) {
        return {HalfLineRegion{anchor, direction, tol}};
    }
    static RegionSpec polygon(std::vector<cplx> vertices) {
        return {PolygonRegion{std::move(vertices)}};
    }
    static RegionSpec filled_julia(Polynomial p, int max_iter = 256, double escape_radius = 0.0) {
        if (escape_radius <= 0.0) escape_radius = default_escape_radius(p);
        return {FilledJuliaRegion{std::move(p), max_iter, escape_radius}};
    }

    bool contains(cplx z) const {
        return std::visit([&](const auto& s) { return contains_impl(s, z); }, shape);
    }

private:
    static bool contains_impl(const DiscRegion& d, cplx z) {
        return std::abs(z - d.center) <= d.radius;
    }
    static bool contains_impl(const HalfLineRegion& h, cplx z) {
        cplx u = h.direction / std::abs(h.direction);
        cplx rel = z - h.anchor;
        double s = rel.real() * u.real() + rel.imag() * u.imag();
        cplx nearest = h.anchor + std::max(0.0, s) * u;
        return std::abs(z - nearest) <= h.tol * (1.0 + std::abs(z));
    }
    static bool contains_impl(const PolygonRegion& poly, cplx z) {
        // Even-odd crossing rule; points on an edge get a deterministic verdict.
        bool inside = false;
        const auto& v = poly.vertices;
        const std::size_t n = v.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            bool crosses = (v[i].imag() > z.imag()) != (v[j].imag() > z.imag());
            if (!crosses) continue;
            double x = v[j].real() + (v[i].real() - v[j].real()) *
                                         (z.imag() - v[j].imag()) / (v[i].imag() - v[j].imag());
            if (z.real() < x) inside = !inside;
        }
        return inside;
    }
    static bool contains_impl(const FilledJuliaRegion& fj, cplx z) {
        return in_filled_julia(fj.p, z, fj.max_iter, fj.escape_radius);
    }
};

} // namespace linea
