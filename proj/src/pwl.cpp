#include "slidecyc/pwl.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slidecyc {

namespace {

PwlCoefficients from_vector(const Eigen::VectorXd& c) {
    if (c.size() != 7) throw std::invalid_argument("pwl parameter vector must have 7 entries");
    PwlCoefficients k;
    k.d_minus = c[0];
    k.t_minus = c[1];
    k.b_plus = c[2];
    k.a11 = c[3];
    k.a12 = c[4];
    k.a21 = c[5];
    k.a22 = c[6];
    return k;
}

Eigen::VectorXd to_vector(const PwlCoefficients& k) {
    Eigen::VectorXd c(7);
    c << k.d_minus, k.t_minus, k.b_plus, k.a11, k.a12, k.a21, k.a22;
    return c;
}

std::pair<SmoothField, SmoothField> pwl_fields(const PwlCoefficients& k) {
    if (!(k.a21 > 0))
        throw std::invalid_argument("inadmissible pwl coefficients: a21 > 0 violated");
    if (!(k.b_plus > k.a21))
        throw std::invalid_argument("inadmissible pwl coefficients: b+ > a21 violated");
    Poly2 Xp = Poly2::constant(k.b_plus) + Poly2::monomial(1, 0, k.a11) +
               Poly2::monomial(0, 1, k.a12);
    Poly2 Yp = Poly2::monomial(1, 0, k.a21) + Poly2::monomial(0, 1, k.a22);
    Poly2 Xm = Poly2::constant(-1.0) + Poly2::monomial(0, 1, k.d_minus);
    Poly2 Ym = Poly2::monomial(1, 0, -1.0) + Poly2::monomial(0, 1, k.t_minus);
    // Breaking parameter: Y+ -> Y+ + lambda.
    SmoothField upper = SmoothField::polynomial(Xp, Yp, Poly2(), Poly2::constant(1.0));
    SmoothField lower = SmoothField::polynomial(Xm, Ym);
    return {std::move(upper), std::move(lower)};
}

}  // namespace

PwsModel build_pwl(const PwlCoefficients& k) {
    PwsModel m;
    auto [up, lo] = pwl_fields(k);
    m.upper = std::move(up);
    m.lower = std::move(lo);
    m.c = to_vector(k);
    m.c0 = m.c;
    m.rebuild = [](const Eigen::VectorXd& c) { return pwl_fields(from_vector(c)); };
    return m;
}

LowerFieldPortrait portrait(const PwlCoefficients& k) {
    LowerFieldPortrait p;
    const double d = k.d_minus, t = k.t_minus;
    if (d == 0) {
        p.kind = t == 0 ? LowerFieldPortrait::Kind::Parabolas
                        : LowerFieldPortrait::Kind::InvariantLine;
        return p;
    }
    p.P = Vec2{t / d, 1.0 / d};
    const double disc = t * t - 4.0 * d;
    if (disc >= 0) {
        const double sq = std::sqrt(disc);
        p.kappa_minus = 0.5 * (t - sq);
        p.kappa_plus = 0.5 * (t + sq);
        double xl = 1.0 / *p.kappa_plus, xr = 1.0 / *p.kappa_minus;
        if (xl > xr) std::swap(xl, xr);
        p.x_L = xl;
        p.x_R = xr;
        p.kind = d < 0 ? LowerFieldPortrait::Kind::Saddle : LowerFieldPortrait::Kind::Node;
        p.repelling = t > 0;
        return p;
    }
    // d > 0, complex eigenvalues.
    p.kind = t == 0 ? LowerFieldPortrait::Kind::Center : LowerFieldPortrait::Kind::Focus;
    p.repelling = t > 0;
    return p;
}

PwlCaseVerdict thm_appl_case(const PwlCoefficients& k, double eta_minus, double eta_plus,
                             const Tolerances& tol) {
    (void)tol;
    PwlCaseVerdict v;
    auto na = [&](const std::string& why) {
        v.figure_case = "not applicable: " + why;
        v.applicable = false;
        return v;
    };
    if (k.a11 == 0) return na("a11 = 0, no sliding singularity");
    const double xstar = (k.a21 - k.b_plus) / k.a11;
    const double tol_corner = 1e-8 * (1.0 + std::abs(xstar));
    const bool at_minus = std::abs(xstar - eta_minus) <= tol_corner;
    const bool at_plus = std::abs(xstar - eta_plus) <= tol_corner;
    if (!at_minus && !at_plus) return na("x* is not at a corner (use general engine)");

    const LowerFieldPortrait p = portrait(k);
    const double d = k.d_minus, t = k.t_minus;
    std::string tag;
    switch (p.kind) {
        case LowerFieldPortrait::Kind::Parabolas:
            tag = "I";
            break;
        case LowerFieldPortrait::Kind::InvariantLine:
            if (t > 0) {
                if (!(xstar < 1.0 / t)) return na("requires x* < 1/t- strictly");
                tag = "II";
            } else {
                if (!(xstar > 1.0 / t)) return na("requires x* > 1/t- strictly");
                tag = "III";
            }
            break;
        case LowerFieldPortrait::Kind::Saddle:
            if (!(*p.x_L < xstar && xstar < *p.x_R))
                return na("requires x_L < x* < x_R strictly");
            tag = at_minus ? "IV" : "V";
            break;
        case LowerFieldPortrait::Kind::Node:
            if (t > 0) {
                if (!(xstar < *p.x_L)) return na("requires x* < x_L, x_R strictly");
                tag = "VI";
            } else {
                if (!(xstar > *p.x_R)) return na("requires x* > x_L, x_R strictly");
                tag = "VII";
            }
            break;
        case LowerFieldPortrait::Kind::Focus:
            tag = t > 0 ? "VIII" : "IX";
            break;
        case LowerFieldPortrait::Kind::Center:
            tag = "X";
            break;
    }
    (void)d;
    v.figure_case = tag;
    v.applicable = true;
    v.bound = 1;
    v.attracting = k.a11 > 0;
    return v;
}

PwlClosedForms closed_form_oracles(const PwlCoefficients& k, const Regularization& reg,
                                   double x) {
    if (k.d_minus != 0 || k.t_minus != 0)
        throw std::invalid_argument("closed_form_oracles: unsupported outside d- = t- = 0");
    if (!(x > 0)) throw std::invalid_argument("closed_form_oracles: requires x > 0");
    PwlClosedForms r{};
    r.Pi = -x;
    r.dPi = -1.0;
    r.s0 = -0.5 * x * x;

    const double p = k.b_plus - k.a21;  // X^sl = (p + q x)/(1 + a21)
    const double q = k.a11;
    const double A = 1.0 + k.a21;
    const double K = reg.dphi(reg.inv(1.0 / A));
    const double k0 = K * A * A;  // integrand = k0 * s / (p + q s)

    if (q == 0) {
        r.I = 0.0;  // odd integrand over [-x, x]
        r.dIdx = 0.0;
        return r;
    }
    const double xstar = -p / q;
    if (std::abs(xstar) <= x) {
        r.I_divergent = true;
        r.I = -std::numeric_limits<double>::infinity();
    } else {
        auto F = [&](double s) { return s / q - (p / (q * q)) * std::log(std::abs(p + q * s)); };
        r.I = k0 * (F(x) - F(-x));
    }
    auto g = [&](double s) { return k0 * s / (p + q * s); };
    r.dIdx = g(x) + g(-x);
    return r;
}

}  // namespace slidecyc
