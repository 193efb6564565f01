#include "slidecyc/sdi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slidecyc/derivatives.hpp"
#include "slidecyc/ode.hpp"
#include "slidecyc/quadrature.hpp"

namespace slidecyc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SdiValue divergent_at(double x0) {
    SdiValue v;
    v.value = kNegInf;
    v.divergent = true;
    v.blamed_zero = x0;
    return v;
}

// Sliding zeros of det Z in the closed interval [a, b]. Endpoints use the
// corner criterion |X^sl| < tau_mult; the interior scan keeps a small margin
// off the endpoints and the two-fold at x = 0.
std::vector<double> path_zeros(const PwsModel& model, double a, double b, const Tolerances& tol) {
    if (a > b) std::swap(a, b);
    std::vector<double> out;
    const double delta = 10.0 * tol.tau_sw;
    const double excl = 1e-6 * (b - a);
    auto endpoint = [&](double e) {
        if (std::abs(e) <= delta) return;
        if (std::abs(sliding_vf(model, e, tol)) < tol.tau_mult) out.push_back(e);
    };
    endpoint(a);
    endpoint(b);
    auto interior = [&](double lo, double hi) {
        if (!(lo < hi)) return;
        for (const auto& z : find_sliding_zeros(model, lo, hi, tol)) out.push_back(z.x0);
    };
    interior(a + excl, std::min(b - excl, -delta));
    interior(std::max(a + excl, delta), b - excl);
    std::sort(out.begin(), out.end());
    return out;
}

SdiValue quadrature_I(const PwsModel& model, const Regularization& reg, double a, double b,
                      const Tolerances& tol) {
    auto f = [&](double s) { return sdi_integrand(model, reg, s, tol); };
    SdiValue v;
    // Split at the removable point s = 0 when it is interior to [a, b].
    double total = 0, err = 0;
    auto piece = [&](double lo, double hi) {
        if (lo == hi) return;
        QuadResult q = adaptive_quadrature(f, lo, hi, tol.quad_rel, 1e-14);
        if (!q.converged) throw std::runtime_error("sdi quadrature failed to converge");
        total += q.value;
        err += q.error;
    };
    if (a < 0 && b > 0) {
        piece(a, 0);
        piece(0, b);
    } else {
        piece(a, b);
    }
    v.value = total;
    v.error_estimate = err;
    return v;
}

}  // namespace

double sdi_integrand(const PwsModel& model, const Regularization& reg, double s,
                     const Tolerances& tol) {
    if (std::abs(s) <= tol.tau_sw) {
        // Removable singularity: linearize around the two-fold.
        const FieldEval up = model.upper.eval(0, 0);
        const FieldEval lo = model.lower.eval(0, 0);
        const double dDY = up.dYdx - lo.dYdx;
        const double detZp = lo.X * up.dYdx - up.X * lo.dYdx;
        const double ustar = -lo.dYdx / dDY;
        return dDY * dDY * s / detZp * reg.dphi(reg.inv(ustar));
    }
    const FieldEval up = model.upper.eval(s, 0);
    const FieldEval lo = model.lower.eval(s, 0);
    const double dY = up.Y - lo.Y;
    const double u = -lo.Y / dY;
    if (!(u > 0 && u < 1))
        throw std::domain_error("sdi_integrand: point outside the sliding region");
    const double det = lo.X * up.Y - up.X * lo.Y;
    return dY * dY / det * reg.dphi(reg.inv(u));
}

SdiValue sdi_I(const PwsModel& model, const Regularization& reg, double x, const Tolerances& tol) {
    if (!(x > 0)) throw std::invalid_argument("sdi_I: requires x > 0");
    HalfMapOptions ho;
    ho.tol = tol;
    ho.record_orbit = false;
    const double a = half_map(model, x, ho).x_out;
    const auto zeros = path_zeros(model, a, x, tol);
    if (!zeros.empty()) return divergent_at(zeros.front());
    return quadrature_I(model, reg, a, x, tol);
}

SdiValue sdi_I_minus(const PwsModel& model, const Regularization& reg, double x,
                     const Tolerances& tol) {
    if (!(x < 0)) throw std::invalid_argument("sdi_I_minus: requires x < 0");
    const auto zeros = path_zeros(model, x, 0.0, tol);
    if (!zeros.empty()) return divergent_at(zeros.front());
    return quadrature_I(model, reg, x, 0.0, tol);
}

SdiValue sdi_I_plus(const PwsModel& model, const Regularization& reg, double x,
                    const Tolerances& tol) {
    if (!(x > 0)) throw std::invalid_argument("sdi_I_plus: requires x > 0");
    const auto zeros = path_zeros(model, 0.0, x, tol);
    if (!zeros.empty()) return divergent_at(zeros.front());
    SdiValue v = quadrature_I(model, reg, 0.0, x, tol);
    v.value = -v.value;  // I+(x) = int_x^0
    return v;
}

double sdi_dIdx(const PwsModel& model, const Regularization& reg, double x,
                const Tolerances& tol) {
    HalfMapOptions ho;
    ho.tol = tol;
    ho.record_orbit = false;
    const HalfMapResult hm = half_map(model, x, ho);
    if (std::abs(sliding_vf(model, x, tol)) < tol.tau_mult)
        throw std::runtime_error("sdi_dIdx: pole at the right endpoint x = " + std::to_string(x));
    if (std::abs(sliding_vf(model, hm.x_out, tol)) < tol.tau_mult)
        throw std::runtime_error("sdi_dIdx: pole at the left endpoint Pi(x) = " +
                                 std::to_string(hm.x_out));
    return sdi_integrand(model, reg, x, tol) -
           sdi_integrand(model, reg, hm.x_out, tol) * hm.derivative;
}

SdiEvaluation sdi_evaluate(const PwsModel& model, const Regularization& reg, double x,
                           const Tolerances& tol) {
    SdiEvaluation ev;
    HalfMapOptions ho;
    ho.tol = tol;
    ho.record_orbit = false;
    const double a = half_map(model, x, ho).x_out;
    ev.I = sdi_I(model, reg, x, tol);
    ev.I_minus = sdi_I_minus(model, reg, a, tol);
    ev.I_plus = sdi_I_plus(model, reg, x, tol);
    try {
        ev.dIdx = sdi_dIdx(model, reg, x, tol);
    } catch (const std::exception&) {
        ev.dIdx = std::numeric_limits<double>::quiet_NaN();
    }
    const double h0 = 1e-2 * std::max(1.0, std::abs(x));
    if (ev.I.finite()) {
        try {
            auto mi = zero_multiplicity(
                [&](double xi) { return sdi_I(model, reg, xi, tol).value; }, x, tol.m_max,
                tol.tau_mult, h0);
            ev.mult_I_at_eta_plus = mi.multiplicity;
        } catch (const std::exception&) {
        }
        try {
            auto md = zero_multiplicity([&](double xi) { return sdi_dIdx(model, reg, xi, tol); },
                                        x, tol.m_max, tol.tau_mult, h0);
            ev.mult_dIdx_at_eta_plus = md.multiplicity;
        } catch (const std::exception&) {
        }
    }
    return ev;
}

SectionSpec SectionSpec::x_equals(double x0, int dir) {
    SectionSpec s;
    s.g = [x0](const Vec2& z) { return z[0] - x0; };
    s.direction = dir;
    return s;
}

SectionSpec SectionSpec::y_equals(double y0, int dir) {
    SectionSpec s;
    s.g = [y0](const Vec2& z) { return z[1] - y0; };
    s.direction = dir;
    return s;
}

OrbitDivergence orbit_divergence_integral(const PwsModel& model, const Regularization& reg,
                                          const RegularizedContext& ctx, const Vec2& start,
                                          const SectionSpec& target, const Tolerances& tol) {
    if (!(ctx.eps > 0)) throw std::invalid_argument("orbit_divergence_integral: eps must be > 0");
    OrbitDivergence out;
    out.eps = ctx.eps;
    out.end = start;
    if (std::abs(target.g(start)) <= tol.event_tol) return out;  // zero-length orbit

    const double eps2 = ctx.eps * ctx.eps;
    OdeOptions opt;
    opt.abs_tol = tol.ode_abs;
    opt.rel_tol = tol.ode_rel;
    opt.event_tol = tol.event_tol;
    opt.t_max = tol.t_max / eps2;
    opt.stiff_threshold = 10.0 / eps2;
    opt.record_orbit = true;
    opt.record_dt = opt.t_max / 20000.0;

    OdeIntegrator ode(
        [&](double, const StateVec& s, StateVec& ds) {
            const Vec2 z{s[0], s[1]};
            const Vec2 f = eval_regularized(model, reg, ctx, z);
            ds[0] = f[0];
            ds[1] = f[1];
            ds[2] = jacobian_regularized(model, reg, ctx, z).second;
        },
        opt);
    ode.set_jacobian([&](double, const StateVec& s, Eigen::MatrixXd& J) {
        J.setZero(3, 3);
        J.topLeftCorner<2, 2>() = jacobian_regularized(model, reg, ctx, {s[0], s[1]}).first;
    });
    std::string abort_reason;
    ode.set_monitor([&](double, const StateVec& s) {
        if (std::abs(s[0]) > tol.box || std::abs(s[1]) > tol.box) {
            abort_reason = "orbit left bounding box";
            return false;
        }
        return true;
    });

    EventSpec ev;
    ev.g = [&target](double, const StateVec& s) { return target.g({s[0], s[1]}); };
    ev.direction = target.direction;
    ev.terminal = true;
    if (target.accept)
        ev.accept = [&target](double, const StateVec& s) { return target.accept({s[0], s[1]}); };

    StateVec s0(3);
    s0 << start[0], start[1], 0.0;
    OdeResult r = ode.integrate(0.0, s0, opt.t_max, {ev});
    if (r.status == OdeStatus::Aborted)
        throw std::runtime_error("orbit_divergence_integral: " + abort_reason);
    if (r.status != OdeStatus::EventHit)
        throw std::runtime_error("orbit_divergence_integral: section not reached within T_max/eps^2" +
                                 (r.message.empty() ? std::string() : " (" + r.message + ")"));

    out.I_tilde = eps2 * r.y[2];
    out.end = Vec2{r.y[0], r.y[1]};
    out.transit_time = r.t;
    for (size_t i = 0; i < r.times.size(); ++i)
        out.orbit.push_back({r.times[i], r.states[i][0], r.states[i][1]});
    return out;
}

}  // namespace slidecyc
