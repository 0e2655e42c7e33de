#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "linea/area.hpp"
#include "linea/errors.hpp"
#include "linea/fit.hpp"
#include "linea/linearizer.hpp"
#include "linea/polynomial.hpp"
#include "linea/roots.hpp"
#include "linea/summation.hpp"

namespace linea {

/// Quadratic differential q(z) dz^2 with rational coefficient q = num/den.
struct QDSpec {
    Polynomial numerator;
    Polynomial denominator;

    cplx eval(cplx z) const { return poly_value(numerator, z) / poly_value(denominator, z); }

    /// Poles of the coefficient (denominator roots, with multiplicity).
    std::vector<cplx> poles() const {
        if (denominator.degree() < 1) return {};
        return poly_roots(denominator);
    }

    /// Pole proximity by denominator magnitude, relative to its natural size
    /// at z. Robust for multiple roots, where solved pole locations are only
    /// accurate to tol^(1/multiplicity).
    bool near_pole(cplx z, double tol) const {
        double natural = denominator.scale() *
                         std::pow(std::max(1.0, std::abs(z)), denominator.degree());
        return std::abs(poly_value(denominator, z)) < tol * natural;
    }
};

/// One evaluation of a pushforward coefficient sigma(w) = sum q(z)/f'(z)^2
/// over the enumerated preimages of w.
struct PushforwardSample {
    cplx w;
    cplx sigma;
    long long terms_used = 0;
    double tail_estimate = 0.0;
    long long skipped_pole_preimages = 0;
};

/// sigma(w) for the exp map: preimages log w + 2 pi i k summed in the fixed
/// order k = 0, (+1,-1), (+2,-2), ... with each +-k pair added as a unit.
/// By default a preimage within tol of a pole of q raises PoleHit; with
/// skip_pole_preimages those preimages are excluded and counted.
inline PushforwardSample pushforward_eval(MapTag tag, const QDSpec& q, cplx w, long long n_max,
                                          bool skip_pole_preimages = false, double tol = 1e-9) {
    if (tag != MapTag::exp_map)
        throw Error("InvalidArgument", "pushforward_eval: only the exp tag has a closed form");
    if (q.denominator.scale() == 0.0)
        throw Error("InvalidArgument", "pushforward_eval: q has an identically zero denominator");
    const cplx base = std::log(w);
    auto pole_guard = [&](cplx z) -> bool {
        if (!q.near_pole(z, tol)) return false;
        if (!skip_pole_preimages) throw PoleHit("pushforward_eval: preimage hits a pole of q");
        return true;
    };

    PushforwardSample out;
    out.w = w;
    KahanSumC acc;
    cplx w2 = w * w;  // f'(z) = e^z = w at every preimage
    cplx last_pair(0.0);
    if (pole_guard(base)) {
        ++out.skipped_pole_preimages;
    } else {
        acc += q.eval(base) / w2;
        ++out.terms_used;
    }
    for (long long k = 1; k <= n_max; ++k) {
        cplx zp = base + cplx(0.0, 2.0 * M_PI * static_cast<double>(k));
        cplx zm = base - cplx(0.0, 2.0 * M_PI * static_cast<double>(k));
        cplx pair(0.0);
        bool used = false;
        if (pole_guard(zp)) {
            ++out.skipped_pole_preimages;
        } else {
            pair += q.eval(zp) / w2;
            used = true;
        }
        if (pole_guard(zm)) {
            ++out.skipped_pole_preimages;
        } else {
            pair += q.eval(zm) / w2;
            used = true;
        }
        acc += pair;
        if (used) {
            out.terms_used += 2;
            last_pair = pair;
        }
    }
    out.sigma = acc.value();
    out.tail_estimate = std::abs(last_pair) * static_cast<double>(n_max);
    return out;
}

/// sigma(w) for a linearizer: preimages from the annulus correspondence plus
/// the series-patch band |z| <= eta.
inline PushforwardSample pushforward_eval(const PoincareMap& F, const QDSpec& q, cplx w,
                                          int n_max, bool skip_pole_preimages = false,
                                          double tol = 1e-9) {
    if (q.denominator.scale() == 0.0)
        throw Error("InvalidArgument", "pushforward_eval: q has an identically zero denominator");
    PushforwardSample out;
    out.w = w;
    KahanSumC acc;
    double last_level_mag = 0.0;
    auto add_term = [&](cplx z, cplx f_prime) {
        if (q.near_pole(z, tol)) {
            if (!skip_pole_preimages)
                throw PoleHit("pushforward_eval: preimage hits a pole of q");
            ++out.skipped_pole_preimages;
            return;
        }
        acc += q.eval(z) / (f_prime * f_prime);
        ++out.terms_used;
    };

    if (auto inner = patch_preimage(F, w)) add_term(inner->z, inner->f_prime);
    AnnuliResult enumerated = preimages_in_annuli(F, w, n_max);
    int top_level = 0;
    for (const AnnulusPreimage& pre : enumerated.points) {
        add_term(pre.z, pre.f_prime);
        if (pre.level > top_level) {
            top_level = pre.level;
            last_level_mag = 0.0;
        }
        if (pre.level == top_level)
            last_level_mag += std::abs(q.eval(pre.z)) / std::norm(pre.f_prime);
    }
    out.sigma = acc.value();
    out.tail_estimate = last_level_mag;
    return out;
}

struct ExpIdentityResult {
    cplx lhs;
    cplx rhs;
    double abs_diff = 0.0;
};

/// Truncated partial-fraction sum sum_{|k|<=N} 1/(w^2 (log w + 2 pi i k)^2)
/// against the closed form 1/(w^3 - 2w^2 + w). Symmetric +-k pairing keeps
/// the truncation tail absolutely controlled. The closed form carries no
/// extra constant; this is pinned by the truncated sum itself in the tests.
inline ExpIdentityResult exp_identity(cplx w, long long N) {
    if (std::abs(w) < 1e-300 || std::abs(w - cplx(1.0)) < 1e-300)
        throw Error("InvalidArgument", "exp_identity: w must avoid {0, 1}");
    const cplx base = std::log(w);
    KahanSumC acc;
    acc += 1.0 / (base * base);
    for (long long k = 1; k <= N; ++k) {
        cplx a(0.0, 2.0 * M_PI * static_cast<double>(k));
        acc += 1.0 / ((base + a) * (base + a)) + 1.0 / ((base - a) * (base - a));
    }
    ExpIdentityResult res;
    res.lhs = acc.value() / (w * w);
    res.rhs = 1.0 / (w * w * w - 2.0 * w * w + w);
    res.abs_diff = std::abs(res.lhs - res.rhs);
    return res;
}

struct PoleFitResult {
    double slope = 0.0;
    double pole_order_at_infinity = 0.0;
    LineFit fit;
};

/// Least-squares decay exponent of |sigma(w)| along a radial sample set, and
/// the pole order at infinity under the convention q(w) ~ w^{d-4} for a pole
/// of order d (coordinate change u = 1/w, dw^2 = du^2/u^4).
inline PoleFitResult pole_fit(const std::vector<PushforwardSample>& samples) {
    if (samples.size() < 4)
        throw Error("InvalidArgument", "pole_fit: need at least 4 samples");
    std::vector<double> xs, ys;
    for (const PushforwardSample& s : samples) {
        double mag = std::abs(s.sigma);
        if (mag < 1e-300) throw ZeroSample("pole_fit: |sigma| vanished at a sample");
        xs.push_back(std::log(std::abs(s.w)));
        ys.push_back(std::log(mag));
    }
    double span = xs.back() - xs.front();
    if (span < 3.0 * std::log(10.0) - 1e-9)
        throw Error("InvalidArgument", "pole_fit: samples must span at least 3 decades");
    PoleFitResult res;
    res.fit = fit_line(xs, ys);
    res.slope = res.fit.slope;
    res.pole_order_at_infinity = res.slope + 4.0;
    return res;
}

} // namespace linea
