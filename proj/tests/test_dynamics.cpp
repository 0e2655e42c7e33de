#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linea/dynamics.hpp"
#include "linea/poly_parse.hpp"

using namespace linea;
using Catch::Approx;

namespace {
const Polynomial kSquare = Polynomial::from_real({0, 0, 1});      // z^2
const Polynomial kBasilica = Polynomial::from_real({-1, 0, 1});   // z^2 - 1
} // namespace

TEST_CASE("fixed points of z^2") {
    auto fps = fixed_points(kSquare);
    REQUIRE(fps.size() == 2);
    CHECK(std::abs(fps[0].location) < 1e-9);
    CHECK(fps[0].classification == FixedPointClass::superattracting);
    CHECK(std::abs(fps[1].location - cplx(1.0)) < 1e-12);
    CHECK(std::abs(fps[1].multiplier - cplx(2.0)) < 1e-12);
    CHECK(fps[1].classification == FixedPointClass::repelling);
}

TEST_CASE("fixed points of a*z + z^2 at a = 3/2") {
    auto fps = fixed_points(parse_polynomial("1.5*z+z^2"));
    REQUIRE(fps.size() == 2);
    // roots sorted by (re, im): -0.5 first
    CHECK(std::abs(fps[0].location - cplx(-0.5)) < 1e-12);
    CHECK(std::abs(fps[0].multiplier - cplx(0.5)) < 1e-12);
    CHECK(fps[0].classification == FixedPointClass::attracting);
    CHECK(std::abs(fps[1].location) < 1e-12);
    CHECK(std::abs(fps[1].multiplier - cplx(1.5)) < 1e-12);
    CHECK(fps[1].classification == FixedPointClass::repelling);
}

TEST_CASE("golden-mean quadratic has the predicted repelling multiplier") {
    double theta = (std::sqrt(5.0) - 1.0) / 2.0;
    cplx lambda0 = std::exp(cplx(0.0, 2.0 * M_PI * theta));
    Polynomial p({cplx(0.0), lambda0, cplx(1.0)});
    auto fps = fixed_points(p);
    bool found = false;
    for (const auto& f : fps) {
        if (std::abs(f.location - (cplx(1.0) - lambda0)) < 1e-10) {
            found = true;
            CHECK(std::abs(f.multiplier - (cplx(2.0) - lambda0)) < 1e-10);
            CHECK(std::abs(f.multiplier) == Approx(2.8194814261).epsilon(1e-6));
            CHECK(f.classification == FixedPointClass::repelling);
        }
    }
    CHECK(found);
}

TEST_CASE("critical orbit analysis") {
    auto sq = critical_orbit_analysis(kSquare, 20);
    CHECK(sq.connected);
    REQUIRE(sq.postcritical_points.size() == 1);
    CHECK(std::abs(sq.postcritical_points[0]) < 1e-12);

    auto bas = critical_orbit_analysis(kBasilica, 20);
    CHECK(bas.connected);
    REQUIRE(bas.postcritical_points.size() == 2);

    auto esc = critical_orbit_analysis(Polynomial::from_real({-5, 0, 1}), 20);
    CHECK_FALSE(esc.connected);
}

TEST_CASE("preimage tree of z^2 at w = 4") {
    auto tree = preimage_tree(kSquare, cplx(4.0), 2);
    REQUIRE(tree.levels.size() == 3);
    REQUIRE(tree.levels[1].size() == 2);
    CHECK(std::abs(tree.levels[1][0].z - cplx(-2.0)) < 1e-12);
    CHECK(std::abs(tree.levels[1][0].cumulative_derivative - cplx(-4.0)) < 1e-12);
    CHECK(std::abs(tree.levels[1][1].z - cplx(2.0)) < 1e-12);
    CHECK(std::abs(tree.levels[1][1].cumulative_derivative - cplx(4.0)) < 1e-12);

    REQUIRE(tree.levels[2].size() == 4);
    const double want = 4.0 * std::pow(2.0, 1.5);  // |(p^2)'| = |4z^3|, |z| = sqrt(2)
    for (const auto& node : tree.levels[2]) {
        CHECK(std::abs(std::abs(node.z) - std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(node.cumulative_derivative) == Approx(want).epsilon(1e-12));
        // forward iteration returns to the root
        cplx fwd = poly_value(kSquare, poly_value(kSquare, node.z));
        CHECK(std::abs(fwd - cplx(4.0)) < 1e-10);
    }
}

TEST_CASE("preimage count at depth 1 equals the degree") {
    auto p = parse_polynomial("z^3 - z + 1");
    auto tree = preimage_tree(p, cplx(2.5, 0.5), 1);
    CHECK(tree.levels[1].size() == 3);
}

TEST_CASE("level cardinality is D^k off the critical values") {
    auto tree = preimage_tree(kBasilica, cplx(3.0), 6);
    for (int k = 0; k <= 6; ++k)
        CHECK(tree.levels[static_cast<std::size_t>(k)].size() ==
              static_cast<std::size_t>(1) << k);
}

TEST_CASE("cumulative derivatives satisfy the chain rule along paths") {
    auto p = parse_polynomial("z^2 + (0.1+0.2i)");
    auto tree = preimage_tree(p, cplx(2.0, 1.0), 8);
    const auto& leaves = tree.levels.back();
    for (std::size_t i = 0; i < leaves.size(); i += 37) {
        cplx product(1.0);
        int level = tree.depth();
        int idx = static_cast<int>(i);
        while (level > 0) {
            const auto& node = tree.levels[static_cast<std::size_t>(level)][static_cast<std::size_t>(idx)];
            product *= poly_eval(p, node.z).second;
            idx = node.parent;
            --level;
        }
        cplx stored = leaves[i].cumulative_derivative;
        REQUIRE(std::abs(product - stored) <= 1e-10 * std::abs(stored));
    }
}

TEST_CASE("node budget enforced") {
    CHECK_THROWS_AS(preimage_tree(kSquare, cplx(4.0), 30), BudgetExceeded);
    CHECK_THROWS_AS(poincare_series(kSquare, cplx(4.0), 2.0, 40), BudgetExceeded);
}

TEST_CASE("poincare series of z^2 at w = 4, t = 2") {
    auto est = poincare_series(kSquare, cplx(4.0), 2.0, 11);
    CHECK(est.level_sums[0] == Approx(0.125).epsilon(1e-12));
    CHECK(est.level_sums[1] == Approx(0.03125).epsilon(1e-12));
    CHECK(est.partial_sums[1] == Approx(0.15625).epsilon(1e-12));
    for (std::size_t k = 1; k < est.partial_sums.size(); ++k)
        CHECK(est.partial_sums[k] >= est.partial_sums[k - 1]);

    // mean per-node term ratio approaches 1/4 (2x nodes, derivative modulus
    // doubles per level)
    for (int n = 4; n <= 10; ++n) {
        double ratio = (est.level_sums[static_cast<std::size_t>(n)] / std::pow(2.0, n + 1)) /
                       (est.level_sums[static_cast<std::size_t>(n - 1)] / std::pow(2.0, n));
        CHECK(ratio >= 0.2);
        CHECK(ratio <= 0.3);
    }
}

TEST_CASE("poincare series of the basilica at w = 3 converges") {
    auto est = poincare_series(kBasilica, cplx(3.0), 2.0, 16);
    CHECK(est.verdict == Verdict::converged);
    // geometric decay of the level sums
    for (std::size_t k = 4; k < est.level_sums.size(); k += 2)
        CHECK(est.level_sums[k] < est.level_sums[k - 2]);
}

TEST_CASE("restriction never increases a level sum") {
    auto full = poincare_series(kBasilica, cplx(3.0), 2.0, 8);
    auto cut = poincare_series(kBasilica, cplx(3.0), 2.0, 8, RegionSpec::disc(cplx(0.0), 1.2));
    REQUIRE(full.level_sums.size() == cut.level_sums.size());
    for (std::size_t k = 0; k < full.level_sums.size(); ++k)
        CHECK(cut.level_sums[k] <= full.level_sums[k] + 1e-15);
}

TEST_CASE("postcritical base points are rejected") {
    CHECK_THROWS_AS(poincare_series(kBasilica, cplx(-1.0), 2.0, 4), PostcriticalQuery);
    CHECK_THROWS_AS(poincare_series(kSquare, cplx(0.0), 2.0, 4), PostcriticalQuery);
}

TEST_CASE("filled Julia membership") {
    CHECK(in_filled_julia(kBasilica, cplx(0.0), 200, 4.0));
    CHECK_FALSE(in_filled_julia(kBasilica, cplx(3.0), 200, 4.0));
    // unit circle is invariant for z^2; roundoff in |z| doubles per step on
    // the repelling circle, so the cap must stay below ~45 iterations
    for (int j = 0; j < 8; ++j) {
        double ang = 2.0 * M_PI * j / 8.0;
        CHECK(in_filled_julia(kSquare, cplx(std::cos(ang), std::sin(ang)), 30, 2.0));
    }
}

TEST_CASE("region membership is total and sane") {
    auto disc = RegionSpec::disc(cplx(1.0), 0.5);
    CHECK(disc.contains(cplx(1.2)));
    CHECK_FALSE(disc.contains(cplx(2.0)));

    auto ray = RegionSpec::half_line(cplx(0.0), cplx(-1.0, 0.0));
    CHECK(ray.contains(cplx(-3.0, 0.0)));
    CHECK_FALSE(ray.contains(cplx(3.0, 0.0)));
    CHECK_FALSE(ray.contains(cplx(-3.0, 0.5)));

    auto square = RegionSpec::polygon({cplx(0, 0), cplx(2, 0), cplx(2, 2), cplx(0, 2)});
    CHECK(square.contains(cplx(1.0, 1.0)));
    CHECK_FALSE(square.contains(cplx(3.0, 1.0)));
    CHECK_FALSE(square.contains(cplx(-0.1, 1.0)));

    auto julia = RegionSpec::filled_julia(kBasilica);
    CHECK(julia.contains(cplx(0.0)));
    CHECK_FALSE(julia.contains(cplx(2.5)));
}
