#include "slidecyc/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slidecyc/derivatives.hpp"

namespace slidecyc {

double det_Z(const PwsModel& model, double x) {
    const FieldEval up = model.upper.eval(x, 0.0, 0.0);
    const FieldEval lo = model.lower.eval(x, 0.0, 0.0);
    return lo.X * up.Y - up.X * lo.Y;
}

Poly1 det_Z_poly(const PwsModel& model) {
    return model.lower.X_on_axis() * model.upper.Y_on_axis() -
           model.upper.X_on_axis() * model.lower.Y_on_axis();
}

double sliding_vf(const PwsModel& model, double x, const Tolerances& tol) {
    const FieldEval up = model.upper.eval(x, 0.0, 0.0);
    const FieldEval lo = model.lower.eval(x, 0.0, 0.0);
    const double dY = up.Y - lo.Y;
    if (std::abs(x) <= tol.tau_sw) {
        // Removable singularity: nu(c) = (det Z)'(0) / d/dx(Y+ - Y-)(0,0).
        const double ddY = up.dYdx - lo.dYdx;
        double ddet;
        if (model.upper.is_polynomial() && model.lower.is_polynomial()) {
            ddet = det_Z_poly(model).derivative()(0.0);
        } else {
            ddet = richardson_derivative([&](double s) { return det_Z(model, s); }, 0.0, 1).value;
        }
        if (ddY <= 0) throw std::runtime_error("switching degeneracy: d/dx(Y+-Y-)(0,0) <= 0");
        return ddet / ddY;
    }
    if (std::abs(dY) <= tol.tau_sw)
        throw std::runtime_error("switching degeneracy: (Y+ - Y-)(x,0) = 0 at x != 0");
    return (lo.X * up.Y - up.X * lo.Y) / dY;
}

SwitchPointClass classify_switch_point(const PwsModel& model, double x, const Tolerances& tol) {
    const FieldEval up = model.upper.eval(x, 0.0, 0.0);
    const FieldEval lo = model.lower.eval(x, 0.0, 0.0);
    SwitchPointClass out{};
    const bool tang_above = std::abs(up.Y) <= tol.tau_sw;
    const bool tang_below = std::abs(lo.Y) <= tol.tau_sw;
    if (tang_above || tang_below) {
        out.tag = SwitchTag::Tangency;
        out.side = tang_above && tang_below ? TangencySide::Both
                   : tang_above            ? TangencySide::Above
                                           : TangencySide::Below;
        if (tang_above) {
            const double lie2 = up.X * up.dYdx;  // (Z+)^2 h
            out.visibility_above = lie2 > tol.tau_sw    ? Visibility::Visible
                                   : lie2 < -tol.tau_sw ? Visibility::Invisible
                                                        : Visibility::Degenerate;
        }
        if (tang_below) {
            const double lie2 = lo.X * lo.dYdx;  // (Z-)^2 h; visible from below iff < 0
            out.visibility_below = lie2 < -tol.tau_sw   ? Visibility::Visible
                                   : lie2 > tol.tau_sw  ? Visibility::Invisible
                                                        : Visibility::Degenerate;
        }
        return out;
    }
    if (up.Y * lo.Y > 0) {
        out.tag = SwitchTag::Crossing;
    } else if (up.Y < 0 && lo.Y > 0) {
        out.tag = SwitchTag::StableSliding;
    } else {
        out.tag = SwitchTag::UnstableSliding;
    }
    return out;
}

TwoFoldCertificate certify_two_fold(const PwsModel& model, const Tolerances& tol,
                                    double x_range) {
    TwoFoldCertificate cert;
    const FieldEval up0 = model.upper.eval(0.0, 0.0, 0.0);
    const FieldEval lo0 = model.lower.eval(0.0, 0.0, 0.0);

    auto add = [&](const std::string& name, double margin) {
        cert.conditions.push_back({name, margin >= tol.tau_margin, margin});
    };
    auto add_eq = [&](const std::string& name, double residual) {
        cert.conditions.push_back({name, std::abs(residual) <= tol.tau_margin, -std::abs(residual)});
    };
    add_eq("Y+(0,0) = 0", up0.Y);
    add_eq("Y-(0,0) = 0", lo0.Y);
    add("X+(0,0) > 0", up0.X);
    add("dY+/dx(0,0) > 0", up0.dYdx);
    add("X-(0,0) < 0", -lo0.X);
    add("dY-/dx(0,0) < 0", -lo0.dYdx);

    // Sampled sliding-sign conditions away from the origin.
    const int n = 64;
    double m_neg = std::numeric_limits<double>::infinity();
    double m_pos = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        const double x = x_range * double(i) / double(n);
        const FieldEval um = model.upper.eval(-x, 0.0, 0.0);
        const FieldEval lm = model.lower.eval(-x, 0.0, 0.0);
        m_neg = std::min({m_neg, -um.Y, lm.Y});
        const FieldEval upx = model.upper.eval(x, 0.0, 0.0);
        const FieldEval lox = model.lower.eval(x, 0.0, 0.0);
        m_pos = std::min({m_pos, upx.Y, -lox.Y});
    }
    add("Y+ < 0 and Y- > 0 for x < 0", m_neg);
    add("Y+ > 0 and Y- < 0 for x > 0", m_pos);

    const double ddY = up0.dYdx - lo0.dYdx;
    double ddet;
    if (model.upper.is_polynomial() && model.lower.is_polynomial()) {
        ddet = det_Z_poly(model).derivative()(0.0);
    } else {
        ddet = richardson_derivative([&](double s) { return det_Z(model, s); }, 0.0, 1).value;
    }
    cert.nu = ddY > 0 ? ddet / ddY : 0.0;
    add("nu(c) > 0", cert.nu);

    cert.passes = std::all_of(cert.conditions.begin(), cert.conditions.end(),
                              [](const CertCondition& c) { return c.holds; });
    return cert;
}

namespace {

// Guarded Newton for a simple root of f in [lo, hi] (sign change assumed).
double refine_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                   double lo, double hi) {
    double flo = f(lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = df(x);
        double xn = d != 0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-15 * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

// Critical point of f (root of df) near a local minimum of |f|.
double refine_extremum(const std::function<double(double)>& df,
                       const std::function<double(double)>& d2f, double lo, double hi) {
    double dlo = df(lo), dhi = df(hi);
    if ((dlo > 0) == (dhi > 0)) return 0.5 * (lo + hi);
    return refine_root(df, d2f, lo, hi);
}

}  // namespace

SlidingZero zero_with_multiplicity(const PwsModel& model, double x0, const Tolerances& tol) {
    SlidingZero z;
    z.x0 = x0;
    if (model.upper.is_polynomial() && model.lower.is_polynomial()) {
        Poly1 p = det_Z_poly(model);
        const double scale = std::max(1.0, p.coeff_scale());
        int k = 0;
        double hk = 1.0;  // k! factor folded into successive derivatives
        while (k < tol.m_max) {
            if (std::abs(p(x0)) > tol.tau_mult * scale * hk) break;
            p = p.derivative();
            ++k;
            hk *= k;
        }
        if (k == 0) k = 1;  // caller asserted x0 is a zero
        z.multiplicity = k;
        z.at_least_m_max = (k >= tol.m_max && std::abs(p(x0)) <= tol.tau_mult * scale * hk);
    } else {
        auto res = zero_multiplicity([&](double s) { return det_Z(model, s); }, x0, tol.m_max,
                                     tol.tau_mult);
        z.multiplicity = std::max(1, res.multiplicity);
        z.at_least_m_max = res.at_least_m_max;
    }
    z.even_parity = (z.multiplicity % 2 == 0);
    return z;
}

std::vector<SlidingZero> find_sliding_zeros(const PwsModel& model, double a, double b,
                                            const Tolerances& tol) {
    if (a > b) std::swap(a, b);
    const double sep = 10.0 * tol.tau_sw;
    if (a < sep && b > -sep)
        throw std::invalid_argument("find_sliding_zeros: interval must exclude the two-fold x=0");

    const int n = tol.grid_nodes;
    const double h = (b - a) / n;
    std::vector<double> fx(n + 1);
    double scale = 0;
    for (int i = 0; i <= n; ++i) {
        fx[i] = det_Z(model, a + i * h);
        scale = std::max(scale, std::abs(fx[i]));
    }
    if (scale == 0) throw std::runtime_error("det Z identically zero on interval");

    auto f = [&](double x) { return det_Z(model, x); };
    auto df = [&](double x) {
        if (model.upper.is_polynomial() && model.lower.is_polynomial())
            return det_Z_poly(model).derivative()(x);
        return richardson_derivative(f, x, 1, h).value;
    };
    auto d2f = [&](double x) {
        if (model.upper.is_polynomial() && model.lower.is_polynomial())
            return det_Z_poly(model).derivative().derivative()(x);
        return richardson_derivative(f, x, 2, h).value;
    };

    std::vector<double> roots;
    // Sign-change brackets catch odd-multiplicity zeros.
    for (int i = 0; i < n; ++i) {
        if (fx[i] == 0) {
            roots.push_back(a + i * h);
        } else if ((fx[i] > 0) != (fx[i + 1] > 0)) {
            roots.push_back(refine_root(f, df, a + i * h, a + (i + 1) * h));
        }
    }
    // Local minima of |det Z| catch even-multiplicity zeros.
    for (int i = 1; i < n; ++i) {
        const double m = std::abs(fx[i]);
        if (m <= std::abs(fx[i - 1]) && m <= std::abs(fx[i + 1]) && m < 1e-3 * scale) {
            if ((fx[i - 1] > 0) != (fx[i + 1] > 0)) continue;  // already a sign change
            const double xc = refine_extremum(df, d2f, a + (i - 1) * h, a + (i + 1) * h);
            if (std::abs(f(xc)) < tol.tau_mult * std::max(1.0, scale)) roots.push_back(xc);
        }
    }
    std::sort(roots.begin(), roots.end());
    // Merge duplicates; genuinely distinct roots closer than a grid cell are
    // unresolved at this resolution.
    std::vector<double> uniq;
    for (double r : roots) {
        // Roots closer than ~sqrt(eps) are one zero numerically (the grid scan
        // and the extremum refinement can both report it, offset by O(h*tau)).
        // Keep the better-polished candidate: at an even-multiplicity zero the
        // raw grid node can sit where det Z merely underflows, and classifying
        // the multiplicity there sees a spurious nonzero derivative.
        if (!uniq.empty() && std::abs(r - uniq.back()) < 1e-7 * (1.0 + std::abs(r))) {
            if (std::abs(df(r)) < std::abs(df(uniq.back()))) uniq.back() = r;
            continue;
        }
        if (!uniq.empty() && std::abs(r - uniq.back()) < h)
            throw std::runtime_error("zero cluster unresolved: increase grid");
        uniq.push_back(r);
    }

    std::vector<SlidingZero> out;
    for (double r : uniq) out.push_back(zero_with_multiplicity(model, r, tol));
    return out;
}

}  // namespace slidecyc
