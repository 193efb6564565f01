#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "slidecyc/cyclicity.hpp"
#include "slidecyc/pwl.hpp"

using namespace slidecyc;

namespace {

PwsModel from_upper_X(const Poly2& X) {
    auto up = SmoothField::polynomial(X, Poly2::monomial(1, 0, 1.0));
    auto lo = SmoothField::polynomial(Poly2::constant(-1.0), Poly2::monomial(1, 0, -1.0));
    return PwsModel{up, lo, {}, {}, nullptr};
}

// X^sl = (1 - x^2)(1 + x/2): slopes -3 at x=1, +1 at x=-1.
PwsModel two_corner_model() {
    return from_upper_X(Poly2::constant(3.0) + Poly2::monomial(1, 0, 1.0) +
                        Poly2::monomial(2, 0, -2.0) + Poly2::monomial(3, 0, -1.0));
}

// X^sl = 1 - x^2: symmetric corners, rho- = rho+.
PwsModel symmetric_model() {
    return from_upper_X(Poly2::constant(3.0) + Poly2::monomial(2, 0, -2.0));
}

SlidingZero corner(double x0, int mult, bool plus) {
    SlidingZero z;
    z.x0 = x0;
    z.multiplicity = mult;
    z.position = plus ? ZeroPosition::CornerPlus : ZeroPosition::CornerMinus;
    z.even_parity = mult % 2 == 0;
    return z;
}

SlidingCycle stub_cycle() {
    SlidingCycle c;
    c.eta_plus = 1.0;
    c.eta_minus = -1.0;
    return c;
}

SdiEvaluation stub_sdi(double I, int mult_I) {
    SdiEvaluation e;
    e.I.value = I;
    e.mult_I_at_eta_plus = mult_I;
    return e;
}

}  // namespace

TEST_CASE("corner rho oracles under arctan") {
    auto m = two_corner_model();
    auto reg = Regularization::arctan();
    // |slope| / |2 * phi'(0)| = |slope| * pi / 2.
    CHECK(corner_rho(m, reg, -1.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
    CHECK(corner_rho(m, reg, 1.0) == doctest::Approx(1.5 * M_PI).epsilon(1e-9));

    auto alg = Regularization::algebraic();
    CHECK(corner_rho(m, alg, -1.0) == doctest::Approx(1.0).epsilon(1e-9));  // 1 / (2 * 1/2)
}

TEST_CASE("rho rejects non-simple corners") {
    // det Z = 2 x (x - 1/2)^2: double zero at 1/2.
    auto m = from_upper_X(Poly2::constant(1.5) + Poly2::monomial(1, 0, -2.0) +
                          Poly2::monomial(2, 0, 2.0));
    CHECK_THROWS_AS(corner_rho(m, Regularization::arctan(), 0.5), std::runtime_error);
}

TEST_CASE("saddle validation matches the prediction") {
    auto m = two_corner_model();
    auto reg = Regularization::arctan();
    for (double x0 : {-1.0, 1.0}) {
        double rho = corner_rho(m, reg, x0);
        auto v = validate_corner_rho(m, reg, x0, rho, 0.1);
        CHECK(v.ok);
        CHECK(v.rel_err < 0.01);
        CHECK(v.saddle[0] == doctest::Approx(x0).epsilon(0.05));
        CHECK(v.measured_ratio < 0.0);
    }
}

TEST_CASE("validation against a wrong rho fails") {
    auto m = two_corner_model();
    auto reg = Regularization::arctan();
    auto v = validate_corner_rho(m, reg, 1.0, 10.0 * corner_rho(m, reg, 1.0), 0.1);
    CHECK_FALSE(v.ok);
}

TEST_CASE("symmetric corners give an uncovered verdict") {
    auto m = symmetric_model();
    auto reg = Regularization::arctan();
    auto cyc = build_cycle(m, 1.0);
    auto label = classify_case(m, cyc);
    REQUIRE(label.tag == CaseTag::VII);
    auto sd = corner_saddle_data(m, reg, cyc);
    CHECK(sd.rho_minus == doctest::Approx(sd.rho_plus).epsilon(1e-9));
    auto v = cyclicity_bound(label, cyc, std::nullopt, sd);
    CHECK(v.kind == CyclicityVerdict::Kind::Uncovered);
}

TEST_CASE("verdict table") {
    auto cyc = stub_cycle();

    SUBCASE("case I: sign of I sets stability") {
        auto att = cyclicity_bound({CaseTag::I, ""}, cyc, stub_sdi(-0.3, 0), std::nullopt);
        CHECK(att.bound == 1);
        CHECK(att.stability == Stability::Attracting);
        CHECK(att.theorem == "T0.1");
        auto rep = cyclicity_bound({CaseTag::I, ""}, cyc, stub_sdi(0.3, 0), std::nullopt);
        CHECK(rep.stability == Stability::Repelling);
    }
    SUBCASE("case I: multiplicity m gives m + 1") {
        auto v = cyclicity_bound({CaseTag::I, ""}, cyc, stub_sdi(0.0, 2), std::nullopt);
        CHECK(v.bound == 3);
        CHECK(v.theorem == "T0.2");
    }
    SUBCASE("case II: 2 + mult of dI/dx") {
        SdiEvaluation e;
        e.mult_dIdx_at_eta_plus = 1;
        auto v = cyclicity_bound({CaseTag::II, ""}, cyc, e, std::nullopt);
        CHECK(v.bound == 3);
        CHECK(v.theorem == "T1");
    }
    SUBCASE("cases III / IV / V") {
        auto iii = cyclicity_bound({CaseTag::III, ""}, cyc, std::nullopt, std::nullopt);
        CHECK(iii.bound == 1);
        CHECK(iii.stability == Stability::Attracting);
        auto iv = cyclicity_bound({CaseTag::IV, ""}, cyc, std::nullopt, std::nullopt);
        CHECK(iv.bound == 1);
        CHECK(iv.stability == Stability::Repelling);
        CHECK(cyclicity_bound({CaseTag::V, ""}, cyc, std::nullopt, std::nullopt).bound == 2);
        CHECK(cyclicity_bound({CaseTag::V_Mirror, ""}, cyc, std::nullopt, std::nullopt).bound == 2);
    }
    SUBCASE("case VI: 2 + min(m-, m+)") {
        auto c = stub_cycle();
        c.zeros = {corner(-1.0, 3, false), corner(1.0, 2, true)};
        auto v = cyclicity_bound({CaseTag::VI, ""}, c, std::nullopt, std::nullopt);
        CHECK(v.bound == 4);
        CHECK(v.theorem == "T3");
    }
    SUBCASE("cases VII / VIII need distinct validated rho") {
        CornerSaddleData sd;
        sd.rho_minus = 1.0;
        sd.rho_plus = 3.0;
        CHECK(cyclicity_bound({CaseTag::VII, ""}, cyc, std::nullopt, sd).bound == 2);
        CHECK(cyclicity_bound({CaseTag::VIII, ""}, cyc, std::nullopt, sd).bound == 3);
        sd.rho_plus = sd.rho_minus * (1.0 + 1e-9);
        CHECK(cyclicity_bound({CaseTag::VII, ""}, cyc, std::nullopt, sd).kind ==
              CyclicityVerdict::Kind::Uncovered);
        CornerSaddleData bad = sd;
        bad.rho_plus = 3.0;
        bad.validated_plus = RhoValidation{};  // ok = false
        CHECK(cyclicity_bound({CaseTag::VII, ""}, cyc, std::nullopt, bad).kind ==
              CyclicityVerdict::Kind::Uncovered);
    }
    SUBCASE("exclusion and uncovered pass-through") {
        auto ex = cyclicity_bound({CaseTag::Excluded, "odd zero at 0.3"}, cyc, std::nullopt,
                                  std::nullopt);
        CHECK(ex.kind == CyclicityVerdict::Kind::NoLimitCycles);
        CHECK(ex.bound_string() == "no limit cycles");
        auto un = cyclicity_bound({CaseTag::Uncovered, "m- = m+ = 2"}, cyc, std::nullopt,
                                  std::nullopt);
        CHECK(un.kind == CyclicityVerdict::Kind::Uncovered);
    }
    SUBCASE("missing inputs throw") {
        CHECK_THROWS_WITH_AS(
            cyclicity_bound({CaseTag::I, ""}, cyc, std::nullopt, std::nullopt),
            doctest::Contains("insufficient data"), std::runtime_error);
        CHECK_THROWS_AS(cyclicity_bound({CaseTag::VII, ""}, cyc, std::nullopt, std::nullopt),
                        std::runtime_error);
    }
}
