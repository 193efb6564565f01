#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "slidecyc/config.hpp"
#include "slidecyc/filippov.hpp"

using namespace slidecyc;

TEST_CASE("value kinds and comments") {
    auto cfg = Config::parse_string(R"(
# top comment
[run]
eps = 0.1
name = "demo"   # trailing comment
verbose = true
grid = [0.1, 0.2, 0.3]
)");
    CHECK(cfg.get("run", "eps").as_number() == doctest::Approx(0.1));
    CHECK(cfg.get("run", "name").as_string() == "demo");
    CHECK(cfg.get("run", "verbose").as_bool());
    REQUIRE(cfg.get("run", "grid").as_array().size() == 3);
    CHECK(cfg.get("run", "grid").as_array()[1] == doctest::Approx(0.2));
    CHECK(cfg.number_or("run", "missing", 7.0) == doctest::Approx(7.0));
    CHECK(cfg.has("run"));
    CHECK_FALSE(cfg.has("nope"));
}

TEST_CASE("malformed input names the line") {
    CHECK_THROWS_AS(Config::parse_string("[a]\nkey value\n"), std::runtime_error);
    CHECK_THROWS_AS(Config::parse_string("key = 1\n"), std::runtime_error);  // outside a section
    try {
        Config::parse_string("[a]\nx = 1\nbroken\n");
        FAIL("expected throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("pwl problem") {
    auto cfg = Config::parse_string(R"(
[pwl]
d_minus = 0.0
t_minus = 0.0
b_plus = 2.0
a11 = 1.0
a21 = 1.0

[regularization]
family = "algebraic"

[context]
eps = 0.05
lambda_tilde = 0.1

[analysis]
eta_plus = 0.8
)");
    auto p = load_problem(cfg);
    REQUIRE(p.pwl.has_value());
    CHECK(p.reg.name() == "algebraic");
    CHECK(p.ctx.eps == doctest::Approx(0.05));
    CHECK(p.ctx.lambda_tilde == doctest::Approx(0.1));
    CHECK(p.ctx.lambda() == doctest::Approx(0.005));
    CHECK(p.eta_plus == doctest::Approx(0.8));
    CHECK(det_Z(p.model, 0.5) == doctest::Approx(0.75));  // x (1 + x)
}

TEST_CASE("explicit polynomial fields") {
    auto cfg = Config::parse_string(R"(
[upper]
x_0_0 = 3.0
x_1_0 = 1.0
x_2_0 = -2.0
x_3_0 = -1.0
y_1_0 = 1.0
y_lambda_0_0 = 1.0

[lower]
x_0_0 = -1.0
y_1_0 = -1.0

[regularization]
family = "arctan"

[context]
eps = 0.1
)");
    auto p = load_problem(cfg);
    CHECK_FALSE(p.pwl.has_value());
    CHECK(p.eta_plus == doctest::Approx(1.0));  // default
    auto e = p.model.upper.eval(0.5, 0.0);
    CHECK(e.X == doctest::Approx(3.0 + 0.5 - 0.5 - 0.125));
    CHECK(e.Y == doctest::Approx(0.5));
    CHECK(p.model.upper.eval(0.5, 0.0, 0.2).Y == doctest::Approx(0.7));
    CHECK(sliding_vf(p.model, 0.5) == doctest::Approx((1.0 - 0.25) * 1.25));
}

TEST_CASE("tolerance overrides") {
    auto cfg = Config::parse_string(R"(
[tolerances]
tau_sw = 1e-9
m_max = 6
quad_rel = 1e-8
)");
    Tolerances tol;
    apply_tolerances(cfg, tol);
    CHECK(tol.tau_sw == doctest::Approx(1e-9));
    CHECK(tol.m_max == 6);
    CHECK(tol.quad_rel == doctest::Approx(1e-8));
    CHECK(tol.tau_mult == doctest::Approx(1e-8));  // untouched default
}
