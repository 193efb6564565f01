#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "slidecyc/filippov.hpp"
#include "slidecyc/pwl.hpp"

using namespace slidecyc;

// Z- = (-1, -x), Z+ = (2 + x, x): det Z = x (1 + x), X^sl = (1 + x)/2.
static PwsModel parabola_model() { return build_pwl(PwlCoefficients::canonical()); }

TEST_CASE("det Z of the parabola model is x (1 + x)") {
    auto m = parabola_model();
    CHECK(det_Z(m, 0.5) == doctest::Approx(0.75));
    CHECK(det_Z(m, -1.0) == doctest::Approx(0.0));
    auto p = det_Z_poly(m);
    CHECK(p(2.0) == doctest::Approx(6.0));
    CHECK(p(-0.25) == doctest::Approx(-0.1875));
}

TEST_CASE("sliding vector field and nu at the two-fold") {
    auto m = parabola_model();
    CHECK(sliding_vf(m, -0.5) == doctest::Approx(0.25));
    CHECK(sliding_vf(m, 0.4) == doctest::Approx(0.7));
    // nu(c) = (det Z)'(0) / d/dx(Y+ - Y-)(0,0) = 1/2
    CHECK(sliding_vf(m, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("switching line partition") {
    auto m = parabola_model();
    CHECK(classify_switch_point(m, -0.5).tag == SwitchTag::StableSliding);
    CHECK(classify_switch_point(m, 0.5).tag == SwitchTag::UnstableSliding);
    auto tf = classify_switch_point(m, 0.0);
    CHECK(tf.tag == SwitchTag::Tangency);
    CHECK(tf.side == TangencySide::Both);
    CHECK(tf.visibility_above == Visibility::Visible);
    CHECK(tf.visibility_below == Visibility::Invisible);

    // Both components of Y positive: trajectories cross.
    auto up = SmoothField::polynomial(Poly2::constant(1.0), Poly2::constant(1.0));
    auto lo = SmoothField::polynomial(Poly2::constant(1.0), Poly2::constant(2.0));
    PwsModel crossing{up, lo, {}, {}, nullptr};
    CHECK(classify_switch_point(crossing, 0.3).tag == SwitchTag::Crossing);
}

TEST_CASE("two-fold certificate passes on the parabola model") {
    auto cert = certify_two_fold(parabola_model());
    CHECK(cert.passes);
    CHECK(cert.nu == doctest::Approx(0.5));
    for (const auto& c : cert.conditions) CHECK(c.holds);
}

TEST_CASE("certificate rejects a field without a transversal fold") {
    // Y+ = x^2 never changes sign: not a visible fold from above.
    auto up = SmoothField::polynomial(Poly2::constant(1.0), Poly2::monomial(2, 0, 1.0));
    auto lo = SmoothField::polynomial(Poly2::constant(-1.0), Poly2::monomial(1, 0, -1.0));
    PwsModel m{up, lo, {}, {}, nullptr};
    auto cert = certify_two_fold(m);
    CHECK_FALSE(cert.passes);
    bool some_violated = false;
    for (const auto& c : cert.conditions) some_violated |= !c.holds;
    CHECK(some_violated);
}

TEST_CASE("inadmissible pwl coefficients are rejected at build time") {
    PwlCoefficients k;
    k.b_plus = 1.0;  // b+ > a21 fails
    CHECK_THROWS_AS(build_pwl(k), std::invalid_argument);
    PwlCoefficients k2;
    k2.a21 = -1.0;
    CHECK_THROWS_AS(build_pwl(k2), std::invalid_argument);
}

TEST_CASE("simple sliding zero with parity") {
    auto zs = find_sliding_zeros(parabola_model(), -2.0, -0.1);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].x0 == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(zs[0].multiplicity == 1);
    CHECK_FALSE(zs[0].even_parity);
    CHECK_FALSE(zs[0].at_least_m_max);
}

TEST_CASE("interval touching the two-fold is rejected") {
    CHECK_THROWS_AS(find_sliding_zeros(parabola_model(), -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("double zero detected with even parity") {
    // X+ = 1 + 2 (x - 1/2)^2 gives det Z = 2 x (x - 1/2)^2.
    auto X = Poly2::constant(1.5) + Poly2::monomial(1, 0, -2.0) + Poly2::monomial(2, 0, 2.0);
    auto up = SmoothField::polynomial(X, Poly2::monomial(1, 0, 1.0));
    auto lo = SmoothField::polynomial(Poly2::constant(-1.0), Poly2::monomial(1, 0, -1.0));
    PwsModel m{up, lo, {}, {}, nullptr};
    auto z = zero_with_multiplicity(m, 0.5);
    CHECK(z.multiplicity == 2);
    CHECK(z.even_parity);

    auto zs = find_sliding_zeros(m, 0.1, 1.0);
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].x0 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(zs[0].multiplicity == 2);
}
