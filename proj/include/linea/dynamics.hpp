#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linea/errors.hpp"
#include "linea/polynomial.hpp"
#include "linea/region.hpp"
#include "linea/roots.hpp"
#include "linea/series_estimate.hpp"

namespace linea {

enum class FixedPointClass { superattracting, attracting, repelling, indifferent };

inline std::string to_string(FixedPointClass c) {
    switch (c) {
        case FixedPointClass::superattracting: return "superattracting";
        case FixedPointClass::attracting: return "attracting";
        case FixedPointClass::repelling: return "repelling";
        default: return "indifferent";
    }
}

struct FixedPointInfo {
    cplx location;
    cplx multiplier;
    FixedPointClass classification;
};

namespace detail {
// |lambda| thresholds sit at the binary64 noise floor with margin.
inline constexpr double kSuperattractingTol = 1e-9;
inline constexpr double kIndifferentTol = 1e-9;
inline constexpr std::int64_t kDefaultNodeBudget = 2'000'000;
} // namespace detail

inline FixedPointClass classify_multiplier(cplx lambda) {
    double m = std::abs(lambda);
    if (m < detail::kSuperattractingTol) return FixedPointClass::superattracting;
    if (std::abs(m - 1.0) < detail::kIndifferentTol) return FixedPointClass::indifferent;
    return m < 1.0 ? FixedPointClass::attracting : FixedPointClass::repelling;
}

/// All fixed points of p (roots of p(z) - z) with their multipliers.
inline std::vector<FixedPointInfo> fixed_points(const Polynomial& p, double tol = 1e-12) {
    Polynomial q = p;
    if (q.coeffs.size() < 2) q.coeffs.resize(2, cplx(0.0));
    q.coeffs[1] -= 1.0;
    std::vector<FixedPointInfo> out;
    for (cplx z : poly_roots(Polynomial(q.coeffs), tol)) {
        cplx lambda = poly_eval(p, z).second;
        out.push_back({z, lambda, classify_multiplier(lambda)});
    }
    return out;
}

struct CriticalOrbitReport {
    std::vector<cplx> postcritical_points;  // deduplicated forward orbit points
    bool connected = true;
};

/// Iterate every critical point n_max times. connected <=> no critical orbit
/// escapes, which for a polynomial is equivalent to the Julia set being
/// connected. Escape is a verdict, not an error.
inline CriticalOrbitReport critical_orbit_analysis(const Polynomial& p, int n_max,
                                                   double escape_radius = 0.0) {
    if (escape_radius <= 0.0) escape_radius = default_escape_radius(p);
    CriticalOrbitReport rep;
    auto push_unique = [&](cplx z) {
        for (cplx q : rep.postcritical_points)
            if (std::abs(q - z) < 1e-9) return;
        rep.postcritical_points.push_back(z);
    };
    for (cplx c : poly_roots(p.derivative())) {
        cplx z = c;
        for (int i = 0; i < n_max; ++i) {
            z = poly_value(p, z);
            if (std::abs(z) > escape_radius) {
                rep.connected = false;
                break;
            }
            push_unique(z);
        }
    }
    return rep;
}

/// Node of an iterated-preimage tree. cumulative_derivative is (p^k)'(z) for
/// a node at level k, accumulated along the path by the chain rule.
struct PreimageNode {
    cplx z;
    cplx cumulative_derivative;
    int parent = -1;
};

struct PreimageTree {
    cplx root;
    std::vector<std::vector<PreimageNode>> levels;  // levels[k] solves p^k(z) = root

    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

namespace detail {

inline void check_node_budget(int degree, int depth, std::int64_t budget) {
    std::int64_t total = 0, level = 1;
    for (int k = 1; k <= depth; ++k) {
        level *= degree;
        total += level;
        if (total > budget)
            throw BudgetExceeded("preimage tree needs " + std::to_string(total) +
                                 "+ nodes at depth " + std::to_string(k) +
                                 ", budget is " + std::to_string(budget));
    }
}

/// One backward step: all preimages of each parent, children in root order.
inline std::vector<PreimageNode> expand_level(const Polynomial& p,
                                              const std::vector<PreimageNode>& parents,
                                              double tol) {
    std::vector<PreimageNode> next;
    next.reserve(parents.size() * static_cast<std::size_t>(p.degree()));
    Polynomial shifted = p;
    for (int i = 0; i < static_cast<int>(parents.size()); ++i) {
        shifted.coeffs[0] = p.coeffs[0] - parents[static_cast<std::size_t>(i)].z;
        for (cplx r : poly_roots(shifted, tol)) {
            cplx dp = poly_eval(p, r).second;
            next.push_back({r, dp * parents[static_cast<std::size_t>(i)].cumulative_derivative, i});
        }
    }
    return next;
}

} // namespace detail

/// Tree of iterated preimages p^{-k}(w), k = 0..depth, with cumulative
/// derivatives. Level k holds D^k nodes (preimages are not merged at critical
/// collisions; queries of postcritical w are rejected upstream).
inline PreimageTree preimage_tree(const Polynomial& p, cplx w, int depth, double tol = 1e-12,
                                  std::int64_t node_budget = detail::kDefaultNodeBudget) {
    detail::check_node_budget(p.degree(), depth, node_budget);
    PreimageTree tree;
    tree.root = w;
    tree.levels.push_back({PreimageNode{w, cplx(1.0), -1}});
    for (int k = 1; k <= depth; ++k)
        tree.levels.push_back(detail::expand_level(p, tree.levels.back(), tol));
    return tree;
}

/// Poincare series of p at exponent t, summed over the preimage tree of w:
/// L_n = sum over p^{-n}(w) of |(p^n)'|^{-t}, optionally restricted to a
/// region. Derivatives are Euclidean, not spherical; for restrictions to a
/// bounded set the two are comparable.
inline SeriesEstimate poincare_series(const Polynomial& p, cplx w, double t, int depth,
                                      const std::optional<RegionSpec>& restrict_region = {},
                                      double tol = 1e-12,
                                      std::int64_t node_budget = detail::kDefaultNodeBudget,
                                      double rtol = detail::kPoincareTailRtol) {
    auto orbit = critical_orbit_analysis(p, 64);
    for (cplx q : orbit.postcritical_points)
        if (std::abs(q - w) < tol)
            throw PostcriticalQuery("base point lies on the computed postcritical set");

    detail::check_node_budget(p.degree(), depth, node_budget);
    std::vector<double> levels;
    std::vector<PreimageNode> current{PreimageNode{w, cplx(1.0), -1}};
    for (int n = 1; n <= depth; ++n) {
        current = detail::expand_level(p, current, tol);
        KahanSum ln;
        for (const PreimageNode& node : current) {
            if (restrict_region && !restrict_region->contains(node.z)) continue;
            ln += std::pow(std::abs(node.cumulative_derivative), -t);
        }
        levels.push_back(ln.value());
    }
    return make_series_estimate(t, std::move(levels), rtol);
}

} // namespace linea
