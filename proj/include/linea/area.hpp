#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "linea/errors.hpp"
#include "linea/linearizer.hpp"
#include "linea/region.hpp"
#include "linea/rng.hpp"
#include "linea/series_estimate.hpp"
#include "linea/summation.hpp"

namespace linea {

/// Explicit maps with closed-form preimages and derivatives. They bypass the
/// linearizer numerics entirely and serve as exact oracles for the generic
/// path: exp is the linearizer of z^2 at 1 (lambda = 2), 2cosh(sqrt z) the
/// linearizer of z^2 - 2 at 2 (lambda = 4).
enum class MapTag { exp_map, cosh_sqrt };

struct ExplicitPreimage {
    cplx z;
    cplx f_prime;
};

namespace detail {

inline cplx cosh_sqrt_value(cplx z) {
    cplx u = std::sqrt(z);
    return 2.0 * std::cosh(u);
}

inline cplx cosh_sqrt_derivative_at_u(cplx u) {
    // d/dz 2cosh(sqrt z) = sinh(u)/u at u = sqrt(z); removable at u = 0.
    if (std::abs(u) < 1e-8) return cplx(1.0) + u * u / 6.0;
    return std::sinh(u) / u;
}

/// Preimages of w under the tagged map, enumerated for |k| <= k_max in the
/// fixed order k = 0, -1, +1, -2, +2, ...
inline std::vector<ExplicitPreimage> explicit_preimages(MapTag tag, cplx w, long long k_max) {
    std::vector<ExplicitPreimage> out;
    out.reserve(static_cast<std::size_t>(2 * k_max + 1));
    if (tag == MapTag::exp_map) {
        cplx base = std::log(w);
        for (long long k = 0; k <= k_max; ++k) {
            for (int sgn : {-1, +1}) {
                if (k == 0 && sgn == +1) continue;
                cplx z = base + cplx(0.0, 2.0 * M_PI * static_cast<double>(sgn * k));
                out.push_back({z, std::exp(z)});
            }
        }
    } else {
        cplx u0 = std::acosh(w / 2.0);
        for (long long k = 0; k <= k_max; ++k) {
            for (int sgn : {-1, +1}) {
                if (k == 0 && sgn == +1) continue;
                cplx u = u0 + cplx(0.0, 2.0 * M_PI * static_cast<double>(sgn * k));
                out.push_back({u * u, cosh_sqrt_derivative_at_u(u)});
            }
        }
    }
    return out;
}

inline double map_level_ratio(MapTag tag) {
    return tag == MapTag::exp_map ? 2.0 : 4.0;  // multiplier of the underlying polynomial
}

/// Bucket index of |z| in the geometric shells (ratio^{n-1}, ratio^n], n >= 1.
inline int shell_index(double mod, double ratio) {
    if (mod <= 1.0) return 0;
    return static_cast<int>(std::ceil(std::log(mod) / std::log(ratio) - 1e-12));
}

} // namespace detail

/// The area-property sum  sum_{f^{-1}(w), |z| > 1}  1 / (|z|^t |f'(z)|^t)
/// for an explicit map tag. Levels are geometric |z|-shells with the ratio of
/// the map's multiplier; `levels` complete shells are enumerated, so the trace
/// mirrors the annulus decomposition of the linearizer path.
inline SeriesEstimate area_sum(MapTag tag, cplx w, double t, int levels,
                               double rtol = detail::kDefaultTailRtol) {
    if (!(t > 0.0) || t > 4.0)
        throw Error("InvalidArgument", "area_sum: t must be in (0, 4]");
    const double ratio = detail::map_level_ratio(tag);
    const double top = std::pow(ratio, levels);
    // Enough k to cover every |z| <= top shell: |z| grows like (2 pi k) for exp
    // and (2 pi k)^2 for cosh_sqrt.
    long long k_max = tag == MapTag::exp_map
                          ? static_cast<long long>(top / (2.0 * M_PI)) + 2
                          : static_cast<long long>(std::sqrt(top) / (2.0 * M_PI)) + 2;
    std::vector<KahanSum> shell(static_cast<std::size_t>(levels) + 1);
    for (const ExplicitPreimage& pre : detail::explicit_preimages(tag, w, k_max)) {
        double mod = std::abs(pre.z);
        if (mod <= 1.0 || mod > top) continue;
        int idx = detail::shell_index(mod, ratio);
        if (idx < 1 || idx > levels) continue;
        shell[static_cast<std::size_t>(idx)] +=
            std::pow(mod * std::abs(pre.f_prime), -t);
    }
    std::vector<double> L;
    for (int n = 1; n <= levels; ++n) L.push_back(shell[static_cast<std::size_t>(n)].value());
    return make_series_estimate(t, std::move(L), rtol);
}

/// Linearizer route of the same sum: preimages enumerated through the annulus
/// correspondence (plus the series patch for the band below eta), levels =
/// annulus index. SingularQuery when w sits on the computed singular set.
inline SeriesEstimate area_sum(const PoincareMap& F, cplx w, double t, int levels,
                               double tol = 1e-12,
                               double rtol = detail::kDefaultTailRtol) {
    if (!(t > 0.0) || t > 4.0)
        throw Error("InvalidArgument", "area_sum: t must be in (0, 4]");
    AnnuliResult enumerated = preimages_in_annuli(F, w, levels, tol);
    std::vector<KahanSum> per_level(static_cast<std::size_t>(levels) + 1);
    for (const AnnulusPreimage& pre : enumerated.points) {
        double mod = std::abs(pre.z);
        if (mod <= 1.0) continue;
        per_level[static_cast<std::size_t>(pre.level)] +=
            std::pow(mod * std::abs(pre.f_prime), -t);
    }
    if (auto inner = patch_preimage(F, w, tol)) {
        double mod = std::abs(inner->z);
        if (mod > 1.0)
            per_level[0] += std::pow(mod * std::abs(inner->f_prime), -t);
    }
    // The patch band contributes to no annulus level; fold it into level 1.
    std::vector<double> L;
    for (int n = 1; n <= levels; ++n) {
        double v = per_level[static_cast<std::size_t>(n)].value();
        if (n == 1) v += per_level[0].value();
        L.push_back(v);
    }
    return make_series_estimate(t, std::move(L), rtol);
}

/// Monte Carlo estimate of a cylindrical area with a binomial error model.
struct AreaEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
    long long hits = 0;
    long long overflow_misses = 0;  // OverflowEscape hits counted as misses
};

namespace detail {

template <typename EvalFn>
inline AreaEstimate cyl_area_mc_impl(EvalFn&& eval, const RegionSpec& K, double r_max,
                                     long long samples, std::uint64_t seed, int partitions) {
    if (!(r_max > 1.0)) throw Error("InvalidArgument", "cylindrical_area_mc: need R_max > 1");
    if (samples < 1) throw Error("InvalidArgument", "cylindrical_area_mc: need samples >= 1");
    partitions = std::max(1, partitions);

    const double log_rmax = std::log(r_max);
    std::vector<long long> hits(static_cast<std::size_t>(partitions), 0);
    std::vector<long long> overflow(static_cast<std::size_t>(partitions), 0);

    auto run_partition = [&](int part) {
        UniformStream rng(seed, static_cast<std::uint64_t>(part));
        long long count = samples / partitions + (part < samples % partitions ? 1 : 0);
        long long h = 0, o = 0;
        for (long long i = 0; i < count; ++i) {
            double r = std::exp(rng.next() * log_rmax);  // log-uniform radius in (1, r_max)
            double ang = rng.next() * 2.0 * M_PI;
            cplx z = r * cplx(std::cos(ang), std::sin(ang));
            try {
                if (K.contains(eval(z))) ++h;
            } catch (const OverflowEscape&) {
                ++o;  // image far outside any compact target
            }
        }
        hits[static_cast<std::size_t>(part)] = h;
        overflow[static_cast<std::size_t>(part)] = o;
    };

    if (partitions == 1) {
        run_partition(0);
    } else {
        std::vector<std::thread> pool;
        for (int part = 0; part < partitions; ++part) pool.emplace_back(run_partition, part);
        for (auto& th : pool) th.join();
    }

    long long total_hits = 0, total_overflow = 0;
    for (int part = 0; part < partitions; ++part) {
        total_hits += hits[static_cast<std::size_t>(part)];
        total_overflow += overflow[static_cast<std::size_t>(part)];
    }

    AreaEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.hits = total_hits;
    est.overflow_misses = total_overflow;
    const double measure = 2.0 * M_PI * log_rmax;  // cylindrical measure of the annulus
    const double p_hat = static_cast<double>(total_hits) / static_cast<double>(samples);
    est.value = p_hat * measure;
    est.std_error = (total_hits > 0)
                        ? est.value * std::sqrt((1.0 - p_hat) /
                                                (p_hat * static_cast<double>(samples)))
                        : 0.0;
    return est;
}

inline cplx explicit_value(MapTag tag, cplx z) {
    return tag == MapTag::exp_map ? std::exp(z) : cosh_sqrt_value(z);
}

} // namespace detail

/// Cylindrical area of f^{-1}(K) inside {1 < |z| < R_max}: samples drawn
/// uniformly in cylindrical measure (log-uniform radius, uniform angle),
/// value = hit_fraction * 2 pi log(R_max). Deterministic for a fixed seed and
/// partition count; partitions = 1 is the bit-exact reference.
inline AreaEstimate cylindrical_area_mc(const PoincareMap& F, const RegionSpec& K, double r_max,
                                        long long samples, std::uint64_t seed,
                                        int partitions = 1) {
    return detail::cyl_area_mc_impl([&](cplx z) { return lin_eval(F, z).first; }, K, r_max,
                                    samples, seed, partitions);
}

inline AreaEstimate cylindrical_area_mc(MapTag tag, const RegionSpec& K, double r_max,
                                        long long samples, std::uint64_t seed,
                                        int partitions = 1) {
    return detail::cyl_area_mc_impl([&](cplx z) { return detail::explicit_value(tag, z); }, K,
                                    r_max, samples, seed, partitions);
}

struct GrowthPoint {
    int n = 0;
    AreaEstimate area;
};

/// Growth sequence A_n = cyl-area of f^{-1}(K) in {1 <= |z| <= |lambda|^n}.
/// Linear growth in n against a compact K is the Eremenko-Lyubich signature.
inline std::vector<GrowthPoint> el_growth(const PoincareMap& F, const RegionSpec& K, int n_max,
                                          long long samples, std::uint64_t seed,
                                          int partitions = 1) {
    if (n_max < 2) throw Error("InvalidArgument", "el_growth: need n_max >= 2");
    std::vector<GrowthPoint> out;
    GrowthPoint zero;
    zero.area.samples = samples;
    zero.area.seed = seed;
    out.push_back(zero);  // n = 0: empty annulus
    const double ml = std::abs(F.lambda);
    for (int n = 1; n <= n_max; ++n) {
        double r = std::pow(ml, n);
        out.push_back({n, cylindrical_area_mc(F, K, r, samples,
                                              seed + static_cast<std::uint64_t>(n), partitions)});
    }
    return out;
}

/// Distance reformulation of the area sum for the exp oracle against the
/// negative real ray: f^{-1}(K) is exactly the union of the horizontal lines
/// Im z = (2m+1) pi, so dist(z, f^{-1}(K)) is available in closed form.
/// Returns sum over z = log w + 2 pi i k, |k| <= k_max, |z| >= 1 of
/// dist(z, f^{-1}(K))^2 / |z|^2.
inline SeriesEstimate distance_form_sum(cplx w, long long k_max,
                                        double rtol = detail::kDefaultTailRtol) {
    if (w.real() <= 0.0 && std::abs(w.imag()) < 1e-300)
        throw Error("InvalidArgument", "distance_form_sum: w must avoid the ray (-inf, 0]");
    const cplx base = std::log(w);
    int max_shell = 1;
    for (long long k = -k_max; k <= k_max; ++k) {
        double mod = std::abs(base + cplx(0.0, 2.0 * M_PI * static_cast<double>(k)));
        if (mod >= 1.0) max_shell = std::max(max_shell, detail::shell_index(mod, 2.0));
    }
    std::vector<KahanSum> shell(static_cast<std::size_t>(max_shell) + 1);
    for (long long k = 0; k <= k_max; ++k) {
        for (int sgn : {-1, +1}) {
            if (k == 0 && sgn == +1) continue;
            cplx z = base + cplx(0.0, 2.0 * M_PI * static_cast<double>(sgn * k));
            double mod = std::abs(z);
            if (mod < 1.0) continue;
            double y = z.imag() / M_PI;
            double frac = y - 2.0 * std::floor(y / 2.0);    // y mod 2, in [0, 2)
            double dist = M_PI * std::abs(frac - 1.0);      // to the nearest odd multiple of pi
            int idx = std::max(1, detail::shell_index(mod, 2.0));
            shell[static_cast<std::size_t>(std::min(idx, max_shell))] += dist * dist / (mod * mod);
        }
    }
    std::vector<double> L;
    for (int n = 1; n <= max_shell; ++n) L.push_back(shell[static_cast<std::size_t>(n)].value());
    return make_series_estimate(2.0, std::move(L), rtol);
}

struct SiegelCompareResult {
    SeriesEstimate trace_in;
    SeriesEstimate trace_out;
    cplx repelling_point;
    cplx repelling_multiplier;
};

namespace detail {

/// Orbit-based validation that w stays inside a rotation domain: bounded by
/// twice its starting modulus for the whole run and recurrent to within 1e-2.
inline void validate_siegel_interior(const Polynomial& p, cplx w) {
    const double bound = 2.0 * std::abs(w);
    const int iters = 10000;
    double best_return = 1e300;
    cplx z = w;
    for (int i = 1; i <= iters; ++i) {
        z = poly_value(p, z);
        if (std::abs(z) > bound)
            throw SiegelValidationFailed(
                "w_in orbit left twice its initial modulus at iterate " + std::to_string(i));
        if (i > 1) best_return = std::min(best_return, std::abs(z - w));
    }
    if (best_return > 1e-2)
        throw SiegelValidationFailed("w_in orbit never returned within 1e-2 of itself");
}

} // namespace detail

/// Convergence/divergence contrast for p = e^{2 pi i theta} z + z^2 with a
/// user-asserted Siegel rotation number theta. Both traces are Poincare series
/// at exponent 2, rooted at the repelling fixed point 1 - lambda_0. w_in is
/// validated by orbit confinement; w_out must escape.
inline SiegelCompareResult siegel_compare(double theta, cplx w_in, cplx w_out, int depth,
                                          double tol = 1e-12,
                                          std::int64_t node_budget = detail::kDefaultNodeBudget) {
    const cplx lambda0 = std::exp(cplx(0.0, 2.0 * M_PI * theta));
    Polynomial p({cplx(0.0), lambda0, cplx(1.0)});

    detail::validate_siegel_interior(p, w_in);

    // w_out must leave the filled Julia set.
    if (in_filled_julia(p, w_out, 1000, default_escape_radius(p)))
        throw SiegelValidationFailed("w_out does not escape");

    SiegelCompareResult res;
    res.repelling_point = cplx(1.0) - lambda0;
    res.repelling_multiplier = 2.0 - lambda0;
    res.trace_in = poincare_series(p, w_in, 2.0, depth, {}, tol, node_budget);
    res.trace_out = poincare_series(p, w_out, 2.0, depth, {}, tol, node_budget);
    return res;
}

} // namespace linea
