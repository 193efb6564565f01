#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slidecyc/model.hpp"
#include "slidecyc/pwl.hpp"

using namespace slidecyc;

namespace {
PwsModel canonical() { return build_pwl(PwlCoefficients::canonical()); }
}  // namespace

TEST_CASE("regularized evaluation at the two-fold and at (1,0)") {
    PwsModel m = canonical();
    auto reg = Regularization::arctan();
    RegularizedContext ctx;
    ctx.eps = 0.05;
    Vec2 v = eval_regularized(m, reg, ctx, {0.0, 0.0});
    CHECK(v[0] == doctest::Approx(0.5));  // (2 - 1)/2 at phi(0) = 1/2
    CHECK(v[1] == doctest::Approx(0.0));
    v = eval_regularized(m, reg, ctx, {1.0, 0.0});
    CHECK(v[0] == doctest::Approx(1.0));  // (3 - 1)/2
    CHECK(v[1] == doctest::Approx(0.0));
}

TEST_CASE("saturated tails reduce to the pure fields") {
    PwsModel m = canonical();
    auto reg = Regularization::arctan();
    RegularizedContext ctx;
    ctx.eps = 0.05;
    const double deep = 100.0 * ctx.eps * ctx.eps;  // |s| = 100 > s_max = 50
    Vec2 up = eval_regularized(m, reg, ctx, {0.3, deep});
    CHECK(up[0] == m.upper.eval(0.3, deep).X);
    CHECK(up[1] == m.upper.eval(0.3, deep).Y);
    Vec2 lo = eval_regularized(m, reg, ctx, {0.3, -deep});
    CHECK(lo[0] == m.lower.eval(0.3, -deep).X);
    CHECK(lo[1] == m.lower.eval(0.3, -deep).Y);
}

TEST_CASE("lambda rescaling enters as eps*lambda_tilde") {
    PwsModel m = canonical();
    auto reg = Regularization::arctan();
    RegularizedContext ctx;
    ctx.eps = 0.1;
    ctx.lambda_tilde = 0.7;
    const double deep = 100.0 * ctx.eps * ctx.eps;
    // Y+ couples additively in lambda.
    Vec2 up = eval_regularized(m, reg, ctx, {0.3, deep});
    CHECK(up[1] == doctest::Approx(0.3 + 0.1 * 0.7));
}

TEST_CASE("jacobian matches finite differences across the layer") {
    PwsModel m = canonical();
    RegularizedContext ctx;
    ctx.eps = 0.3;  // wide layer so FD steps stay accurate
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-0.3, 0.3);
    for (auto reg : {Regularization::arctan(), Regularization::algebraic()}) {
        for (int k = 0; k < 100; ++k) {
            const Vec2 z{ux(rng), uy(rng)};
            auto [J, tr] = jacobian_regularized(m, reg, ctx, z);
            CHECK(tr == J.trace());
            const double h = 1e-7;
            for (int j = 0; j < 2; ++j) {
                Vec2 zp = z, zm = z;
                zp[j] += h;
                zm[j] -= h;
                const Vec2 fd = (eval_regularized(m, reg, ctx, zp) -
                                 eval_regularized(m, reg, ctx, zm)) /
                                (2 * h);
                CHECK(J(0, j) == doctest::Approx(fd[0]).epsilon(1e-4));
                CHECK(J(1, j) == doctest::Approx(fd[1]).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("callback fields supply their own jacobian") {
    auto f = SmoothField::callback([](double x, double y, double lambda) {
        FieldEval e;
        e.X = std::sin(x) + lambda;
        e.Y = x * y;
        e.dXdx = std::cos(x);
        e.dYdx = y;
        e.dYdy = x;
        return e;
    });
    FieldEval e = f.eval(0.5, 2.0, 0.1);
    CHECK(e.X == doctest::Approx(std::sin(0.5) + 0.1));
    CHECK(e.divergence() == doctest::Approx(std::cos(0.5) + 0.5));
    CHECK_THROWS(f.X_on_axis());
}

TEST_CASE("parameter rebuild hook") {
    PwsModel m = canonical();
    Eigen::VectorXd c = m.c;
    c[2] = 3.0;  // b+
    PwsModel m2 = m.at(c);
    CHECK(m2.upper.eval(0.0, 0.0).X == doctest::Approx(3.0));
    CHECK(m.upper.eval(0.0, 0.0).X == doctest::Approx(2.0));  // original untouched
}
