#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linea/summation.hpp"

namespace linea {

enum class Verdict { converged, diverging_suspected, undecided };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::diverging_suspected: return "diverging_suspected";
        default: return "undecided";
    }
}

/// Finite-depth trace of a nonnegative series: per-level sums, running
/// partial sums and a convergence verdict. The verdict is an honest
/// finite-computation report, never a proof.
struct SeriesEstimate {
    double exponent = 0.0;
    std::vector<double> level_sums;    // L_1..L_n, all >= 0
    std::vector<double> partial_sums;  // S_k = S_{k-1} + L_k
    Verdict verdict = Verdict::undecided;
    std::optional<double> tail_bound;

    double value() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }

    /// Best estimate of the full series: partial sum plus the geometric tail
    /// extrapolation when one is available.
    double extrapolated_value() const { return value() + tail_bound.value_or(0.0); }

    int depth() const { return static_cast<int>(level_sums.size()); }
};

namespace detail {

// Net non-decay slack over the 4-level window; level sums of Siegel-type
// divergence oscillate +-10% around a constant, so consecutive-pair
// comparisons cannot be used.
inline constexpr double kDivergenceSlack = 0.9;
// Tail rule for shell-based area sums: last levels below 1e-4 of the total.
inline constexpr double kDefaultTailRtol = 1e-4;
// Tail rule for tree-based Poincare series: depth costs D^n nodes, and the
// slowest convergent quadratic examples in scope decay at ~0.8/level, so at
// feasible depths a decaying tail still contributes ~1e-3 per level.
inline constexpr double kPoincareTailRtol = 1e-2;

} // namespace detail

/// Verdict rules. Converged: each of the last 3 levels contributes less than
/// rtol of the running total. Diverging suspected: no net decay across the
/// last 4 levels. Otherwise undecided.
inline Verdict classify_levels(const std::vector<double>& L, const std::vector<double>& S,
                               double rtol = detail::kDefaultTailRtol) {
    const std::size_t n = L.size();
    if (n >= 3) {
        bool small_tail = true;
        for (std::size_t k = n - 3; k < n; ++k)
            if (!(S[k] > 0.0) || L[k] / S[k] >= rtol) small_tail = false;
        if (small_tail) return Verdict::converged;
    }
    if (n >= 4 && L[n - 1] > 0.0 && L[n - 1] >= detail::kDivergenceSlack * L[n - 4])
        return Verdict::diverging_suspected;
    return Verdict::undecided;
}

/// Geometric tail extrapolation; the rate is taken as sqrt(L_n / L_{n-2}) so
/// that even/odd level oscillation cancels. Only set when the tail decays.
inline std::optional<double> geometric_tail_bound(const std::vector<double>& L) {
    const std::size_t n = L.size();
    if (n < 2) return std::nullopt;
    double r;
    if (n >= 3 && L[n - 3] > 0.0)
        r = std::sqrt(L[n - 1] / L[n - 3]);
    else if (L[n - 2] > 0.0)
        r = L[n - 1] / L[n - 2];
    else
        return std::nullopt;
    if (!(r < 0.9)) return std::nullopt;
    return L[n - 1] * r / (1.0 - r);
}

/// Assemble a SeriesEstimate from per-level sums.
inline SeriesEstimate make_series_estimate(double exponent, std::vector<double> levels,
                                           double rtol = detail::kDefaultTailRtol) {
    SeriesEstimate est;
    est.exponent = exponent;
    est.level_sums = std::move(levels);
    est.partial_sums.resize(est.level_sums.size());
    KahanSum acc;
    for (std::size_t k = 0; k < est.level_sums.size(); ++k) {
        acc += est.level_sums[k];
        est.partial_sums[k] = acc.value();
    }
    est.verdict = classify_levels(est.level_sums, est.partial_sums, rtol);
    if (est.verdict == Verdict::converged) est.tail_bound = geometric_tail_bound(est.level_sums);
    return est;
}

} // namespace linea
