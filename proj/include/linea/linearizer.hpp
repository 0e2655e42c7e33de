#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "linea/dynamics.hpp"
#include "linea/errors.hpp"
#include "linea/fit.hpp"
#include "linea/polynomial.hpp"
#include "linea/power_series.hpp"
#include "linea/summation.hpp"

namespace linea {

/// Poincare function f of p at a repelling fixed point zeta: the entire map
/// with f(lambda z) = p(f(z)), f(0) = zeta, f'(0) = 1. Holds the local power
/// series, the sampled injectivity radius eta, and a Cauchy-Hadamard estimate
/// of where the truncated series can be trusted.
struct PoincareMap {
    Polynomial p;
    cplx zeta;
    cplx lambda;
    PowerSeries series;
    double eta = 0.0;
    double conv_radius_est = 0.0;

    /// Fundamental annulus A = { eta/|lambda| < |z| <= eta }.
    double annulus_outer() const { return eta; }
    double annulus_inner() const { return eta / std::abs(lambda); }
};

namespace detail {

inline constexpr double kRepellingMargin = 1e-6;
inline constexpr double kOverflowLimit = 1e150;

inline double cauchy_hadamard_radius(const PowerSeries& s) {
    // 1 / limsup |a_n|^{1/n}, proxied by the max over the last 16 coefficients.
    int M = s.truncation_order();
    double worst = 0.0;
    for (int n = std::max(1, M - 15); n <= M; ++n) {
        double a = std::abs(s.coeffs[static_cast<std::size_t>(n)]);
        if (a > 0.0) worst = std::max(worst, std::pow(a, 1.0 / n));
    }
    if (worst == 0.0) return 1e12;
    return 1.0 / worst;
}

} // namespace detail

inline double injectivity_radius(PoincareMap& F);

/// Solve the Koenigs recursion a_n (lambda^n - lambda) = [z^n] p(f_{<n}(z))
/// for n = 2..M, normalized to a_0 = zeta, a_1 = 1. Populates the convergence
/// radius estimate and the injectivity radius.
inline PoincareMap koenigs_coeffs(const Polynomial& p, cplx zeta, int M, double tol = 1e-12) {
    if (p.degree() < 2) throw Error("InvalidArgument", "koenigs_coeffs: degree must be >= 2");
    if (M < 2) throw Error("InvalidArgument", "koenigs_coeffs: order must be >= 2");

    // Tighten the fixed point from the caller's (possibly rounded) value.
    for (int it = 0; it < 50; ++it) {
        auto [v, d] = poly_eval(p, zeta);
        cplx g = v - zeta, gp = d - 1.0;
        if (std::abs(g) < 1e-15 * p.scale() || gp == cplx(0.0)) break;
        cplx step = g / gp;
        if (std::abs(step) > 0.1 * (1.0 + std::abs(zeta)))
            throw Error("NotFixedPoint", "koenigs_coeffs: given point is not near a fixed point");
        zeta -= step;
    }
    if (std::abs(poly_value(p, zeta) - zeta) >= tol * std::max(1.0, p.scale()))
        throw Error("NotFixedPoint", "koenigs_coeffs: p(zeta) != zeta within tolerance");

    cplx lambda = poly_eval(p, zeta).second;
    if (std::abs(lambda) <= 1.0 + detail::kRepellingMargin)
        throw NotRepelling("koenigs_coeffs: |multiplier| = " + std::to_string(std::abs(lambda)) +
                           " <= 1 + 1e-6; the recursion divisor degenerates");

    PoincareMap F;
    F.p = p;
    F.zeta = zeta;
    F.lambda = lambda;
    F.series = PowerSeries(M);
    F.series.coeffs[0] = zeta;
    F.series.coeffs[1] = cplx(1.0);

    cplx lambda_pow = lambda;  // lambda^n
    for (int n = 2; n <= M; ++n) {
        lambda_pow *= lambda;
        PowerSeries comp = poly_compose_series(p, F.series, n);
        F.series.coeffs[static_cast<std::size_t>(n)] =
            comp.coeffs[static_cast<std::size_t>(n)] / (lambda_pow - lambda);
    }

    F.conv_radius_est = detail::cauchy_hadamard_radius(F.series);
    injectivity_radius(F);
    return F;
}

/// Largest residual of the functional equation on the coefficients,
/// max_{n<=M} |[z^n](f(lambda z) - p(f(z)))|, relative to the composition scale.
inline double functional_equation_residual(const PoincareMap& F) {
    int M = F.series.truncation_order();
    PowerSeries comp = poly_compose_series(F.p, F.series, M);
    double scale = 1.0;
    for (const cplx& c : comp.coeffs) scale = std::max(scale, std::abs(c));
    double worst = 0.0;
    cplx lp(1.0);
    for (int n = 0; n <= M; ++n) {
        worst = std::max(worst, std::abs(F.series.coeffs[static_cast<std::size_t>(n)] * lp -
                                         comp.coeffs[static_cast<std::size_t>(n)]) /
                                    scale);
        lp *= F.lambda;
    }
    return worst;
}

/// Sampled search for a radius eta <= min(0.9, conv_radius_est/2) on which the
/// truncated series looks injective: f' stays away from 0 and close to f'(0),
/// and no two sampled points map to nearly the same value. A heuristic
/// certificate, as honest numerics for injectivity must be.
inline double injectivity_radius(PoincareMap& F) {
    double start = std::min(0.9, 0.5 * F.conv_radius_est);
    for (double eta = start; eta >= 1e-6; eta *= 0.8) {
        std::vector<cplx> pts;
        std::vector<cplx> vals, ders;
        bool ok = true;
        for (int ring = 1; ring <= 6 && ok; ++ring) {
            double r = eta * ring / 6.0;
            for (int j = 0; j < 48; ++j) {
                double ang = 2.0 * M_PI * j / 48.0 + 0.1 * ring;
                cplx z = r * cplx(std::cos(ang), std::sin(ang));
                auto [v, d] = F.series.eval_with_derivative(z);
                if (std::abs(d) < 1e-8 || std::abs(d - 1.0) >= 0.95) {
                    ok = false;
                    break;
                }
                pts.push_back(z);
                vals.push_back(v);
            }
        }
        for (std::size_t i = 0; i < pts.size() && ok; ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (std::abs(vals[i] - vals[j]) < 1e-9 * std::abs(pts[i] - pts[j])) {
                    ok = false;
                    break;
                }
        if (ok) {
            F.eta = eta;
            return eta;
        }
    }
    throw DegenerateRadius("injectivity_radius: no eta >= 1e-6 passed the sampled checks");
}

/// f(z) and f'(z) anywhere in the plane: pull z into the series patch with
/// the minimal n such that |z|/|lambda|^n <= eta, evaluate the series, then
/// push forward through n applications of p with the chain rule.
inline std::pair<cplx, cplx> lin_eval(const PoincareMap& F, cplx z) {
    if (!(F.eta > 0.0)) throw Error("InvalidArgument", "lin_eval: map has no injectivity radius");
    int n = 0;
    cplx zt = z;
    while (std::abs(zt) > F.eta) {
        zt /= F.lambda;
        ++n;
    }
    auto [val, der] = F.series.eval_with_derivative(zt);
    for (int k = 0; k < n; ++k) {
        auto [pv, pd] = poly_eval(F.p, val);
        if (std::abs(pv) > detail::kOverflowLimit)
            throw OverflowEscape("lin_eval: iterate exceeded 1e150 at step " + std::to_string(k));
        der *= pd;
        val = pv;
        der /= F.lambda;
    }
    return {val, der};
}

/// log|f(z)| without overflow: iterate p exactly while moduli are moderate,
/// then switch to iterating the log of the modulus (the neglected lower-order
/// terms are below 1e-25 relative once past the switch threshold).
inline double lin_log_abs(const PoincareMap& F, cplx z) {
    if (!(F.eta > 0.0))
        throw Error("InvalidArgument", "lin_log_abs: map has no injectivity radius");
    int n = 0;
    cplx zt = z;
    while (std::abs(zt) > F.eta) {
        zt /= F.lambda;
        ++n;
    }
    cplx val = F.series.eval(zt);
    const int D = F.p.degree();
    const double switch_mod = std::pow(10.0, 300.0 / D - 2.0);
    const double log_lead = std::log(std::abs(F.p.leading()));
    int k = 0;
    for (; k < n; ++k) {
        if (std::abs(val) > switch_mod) break;
        val = poly_value(F.p, val);
    }
    if (k == n) return std::log(std::abs(val));
    double L = std::log(std::abs(val));
    for (; k < n; ++k) L = log_lead + D * L;
    return L;
}

enum class OrderMethod { exact_formula, growth_fit };

struct OrderEstimate {
    double value = 0.0;
    OrderMethod method = OrderMethod::exact_formula;
    std::optional<double> fit_residual;
};

/// rho(f) = log D / log|lambda|.
inline OrderEstimate order_exact(const PoincareMap& F) {
    return {std::log(static_cast<double>(F.p.degree())) / std::log(std::abs(F.lambda)),
            OrderMethod::exact_formula, std::nullopt};
}

/// Growth-fit estimate of the order: slope of log log M(r) against log r,
/// with M(r) the sampled maximum modulus. Maximum modulus is computed in log
/// space, so radii far beyond binary64 range of f itself are fine.
inline OrderEstimate order_empirical(const PoincareMap& F, const std::vector<double>& radii,
                                     int samples_per_circle = 1024) {
    if (radii.size() < 4)
        throw Error("InvalidArgument", "order_empirical: need at least 4 radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] <= F.eta)
            throw Error("InvalidArgument", "order_empirical: radii must exceed eta");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw Error("InvalidArgument", "order_empirical: radii must be increasing");
    }
    std::vector<double> xs, ys;
    for (double r : radii) {
        double log_max = -1e300;
        for (int j = 0; j < samples_per_circle; ++j) {
            double ang = 2.0 * M_PI * j / samples_per_circle;
            log_max = std::max(log_max, lin_log_abs(F, r * cplx(std::cos(ang), std::sin(ang))));
        }
        if (!(log_max > 0.0))
            throw InsufficientGrowth("order_empirical: max modulus <= 1 at r = " +
                                     std::to_string(r) + "; pick larger radii");
        xs.push_back(std::log(r));
        ys.push_back(std::log(log_max));
    }
    LineFit fit = fit_line(xs, ys);
    return {fit.slope, OrderMethod::growth_fit, fit.residual_rms};
}

/// One preimage of w recovered through the annulus correspondence: z solves
/// f(z) = w in the annulus ring of index `level`; the pair (w_tilde, pn_prime)
/// is the matching point of p^{-level}(w) with its cumulative derivative.
struct AnnulusPreimage {
    cplx z;
    cplx f_prime;
    int level = 0;
    cplx zeta;      // patch representative, z = lambda^level * zeta
    cplx w_tilde;   // f(zeta)
    cplx pn_prime;  // (p^level)'(w_tilde)
};

struct AnnuliResult {
    std::vector<AnnulusPreimage> points;
    std::vector<cplx> seed_failures;  // candidates where Newton failed from every seed
};

namespace detail {

enum class NewtonOutcome { found, left_patch, stuck };

struct PatchNewtonResult {
    NewtonOutcome outcome = NewtonOutcome::left_patch;
    cplx root;
};

/// Newton on the series patch for f(zeta) = target. `left_patch` means every
/// seed escaped the clamp radius (the target has no preimage on the patch);
/// `stuck` means some seed stayed on the patch without converging, which is a
/// genuine seed failure worth reporting.
inline PatchNewtonResult patch_newton(const PoincareMap& F, cplx target, double clamp_radius,
                                      const std::vector<cplx>& seeds, double tol) {
    bool any_stuck = false;
    for (cplx seed : seeds) {
        cplx zeta = seed;
        bool left = false, converged = false;
        for (int it = 0; it < 40; ++it) {
            auto [v, d] = F.series.eval_with_derivative(zeta);
            cplx g = v - target;
            if (std::abs(g) <= tol * (1.0 + std::abs(target))) {
                converged = true;
                break;
            }
            if (d == cplx(0.0)) break;
            zeta -= g / d;
            if (std::abs(zeta) > clamp_radius) {
                left = true;
                break;
            }
        }
        if (converged) return {NewtonOutcome::found, zeta};
        if (!left) any_stuck = true;
    }
    return {any_stuck ? NewtonOutcome::stuck : NewtonOutcome::left_patch, cplx(0.0)};
}

inline std::vector<cplx> annulus_seeds(const PoincareMap& F) {
    const double ml = std::abs(F.lambda);
    const double r1 = F.eta * std::pow(ml, -2.0 / 3.0);
    const double r2 = F.eta * std::pow(ml, -1.0 / 3.0);
    std::vector<cplx> seeds;
    seeds.reserve(64);
    for (int j = 0; j < 32; ++j) {
        double ang = 2.0 * M_PI * j / 32.0;
        seeds.push_back(r1 * cplx(std::cos(ang), std::sin(ang)));
        seeds.push_back(r2 * cplx(std::cos(ang + 0.098), std::sin(ang + 0.098)));
    }
    return seeds;
}

inline std::vector<cplx> patch_seeds(const PoincareMap& F) {
    std::vector<cplx> seeds{cplx(0.0)};
    for (double frac : {0.25, 0.5, 0.75, 0.95})
        for (int j = 0; j < 16; ++j) {
            double ang = 2.0 * M_PI * j / 16.0 + frac;
            seeds.push_back(F.eta * frac * cplx(std::cos(ang), std::sin(ang)));
        }
    return seeds;
}

/// Range of |f - zeta| over the closed eta-disc, padded; cheap prefilter for
/// membership of a candidate in f(A).
inline std::pair<double, double> image_mod_range(const PoincareMap& F) {
    double lo = 1e300, hi = 0.0;
    for (int ring = 1; ring <= 8; ++ring) {
        double r = F.annulus_inner() + (F.eta - F.annulus_inner()) * (ring - 1) / 7.0;
        for (int j = 0; j < 64; ++j) {
            double ang = 2.0 * M_PI * j / 64.0;
            double m = std::abs(F.series.eval(r * cplx(std::cos(ang), std::sin(ang))) - F.zeta);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    }
    return {lo * 0.5, hi * 2.0};
}

} // namespace detail

/// Enumerate f^{-1}(w) in the annuli eta|lambda|^{n-1} < |z| <= eta|lambda|^n
/// for n = 1..n_max, through the correspondence with p^{-n}(w) intersected
/// with f(A). Membership in f(A) is decided by Newton on the series patch.
inline AnnuliResult preimages_in_annuli(const PoincareMap& F, cplx w, int n_max,
                                        double tol = 1e-12,
                                        std::int64_t node_budget = detail::kDefaultNodeBudget) {
    auto orbit = critical_orbit_analysis(F.p, 64);
    for (cplx q : orbit.postcritical_points)
        if (std::abs(q - w) < tol)
            throw SingularQuery("preimages_in_annuli: w lies on the computed postcritical set");
    detail::check_node_budget(F.p.degree(), n_max, node_budget);

    const std::vector<cplx> seeds = detail::annulus_seeds(F);
    const auto [img_lo, img_hi] = detail::image_mod_range(F);
    const double clamp = std::min(2.0 * F.eta, 0.5 * F.conv_radius_est);
    const double inner = F.annulus_inner();
    const double eval_tol = std::max(tol, 1e-13);

    AnnuliResult result;
    std::vector<PreimageNode> level{PreimageNode{w, cplx(1.0), -1}};
    cplx lambda_pow(1.0);
    for (int n = 1; n <= n_max; ++n) {
        level = detail::expand_level(F.p, level, tol);
        lambda_pow *= F.lambda;
        for (const PreimageNode& node : level) {
            double dist = std::abs(node.z - F.zeta);
            if (dist < img_lo || dist > img_hi) continue;
            auto newton = detail::patch_newton(F, node.z, clamp, seeds, eval_tol);
            if (newton.outcome == detail::NewtonOutcome::left_patch) continue;
            if (newton.outcome == detail::NewtonOutcome::stuck) {
                result.seed_failures.push_back(node.z);
                continue;
            }
            cplx zeta = newton.root;
            double m = std::abs(zeta);
            if (m <= inner || m > F.eta) continue;  // converged outside A: not in f(A)
            cplx z = lambda_pow * zeta;
            auto [fv, fd] = lin_eval(F, z);
            if (std::abs(fv - w) >= 1e-9 * (1.0 + std::abs(w))) continue;
            bool dup = false;
            for (const AnnulusPreimage& q : result.points)
                if (std::abs(q.z - z) < 1e-9 * (1.0 + std::abs(z))) dup = true;
            if (dup) continue;
            result.points.push_back(
                {z, fd, n, zeta, node.z, node.cumulative_derivative});
        }
    }
    return result;
}

/// Preimage of w inside the series patch |z| <= eta, if any (unique by
/// injectivity).
inline std::optional<AnnulusPreimage> patch_preimage(const PoincareMap& F, cplx w,
                                                     double tol = 1e-12) {
    auto newton = detail::patch_newton(F, w, std::min(2.0 * F.eta, 0.5 * F.conv_radius_est),
                                       detail::patch_seeds(F), std::max(tol, 1e-13));
    if (newton.outcome != detail::NewtonOutcome::found || std::abs(newton.root) > F.eta)
        return std::nullopt;
    auto [fv, fd] = F.series.eval_with_derivative(newton.root);
    if (std::abs(fv - w) >= 1e-9 * (1.0 + std::abs(w))) return std::nullopt;
    return AnnulusPreimage{newton.root, fd, 0, newton.root, w, cplx(1.0)};
}

/// Exact rational value.
struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational make_rational(long long num, long long den) {
    long long g = std::gcd(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

enum class SchwarzianKind { entire_nonlinearity, meromorphic_schwarzian, log_singularity_count };

/// Classical order formulas for maps with rational Schwarzian derivative:
/// rho = 1 + deg_inf(nonlinearity) for entire maps, rho = (2 + deg_inf(S))/2
/// in general, and rho = (number of logarithmic singularities)/2.
inline Rational schwarzian_order(SchwarzianKind kind, long long deg_or_count) {
    if (deg_or_count < 0)
        throw Error("InvalidArgument", "schwarzian_order: argument must be >= 0");
    switch (kind) {
        case SchwarzianKind::entire_nonlinearity: return make_rational(1 + deg_or_count, 1);
        case SchwarzianKind::meromorphic_schwarzian: return make_rational(2 + deg_or_count, 2);
        default: return make_rational(deg_or_count, 2);
    }
}

} // namespace linea
