#include "slidecyc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slidecyc/derivatives.hpp"
#include "slidecyc/filippov.hpp"

namespace slidecyc {

namespace {

OdeOptions regularized_options(const RegularizedContext& ctx, const Tolerances& tol,
                               bool record) {
    OdeOptions opt;
    opt.abs_tol = tol.ode_abs;
    opt.rel_tol = tol.ode_rel;
    opt.event_tol = tol.event_tol;
    const double eps2 = ctx.eps * ctx.eps;
    opt.t_max = 50.0 / eps2;  // slow passage along the critical curve
    opt.stiff_threshold = 10.0 / eps2;
    opt.record_orbit = record;
    if (record) opt.record_dt = opt.t_max / 50000.0;
    return opt;
}

double dist_to_polyline(const Vec2& p, const std::vector<Vec2>& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2 a = poly[i], d = poly[i + 1] - poly[i];
        const double len2 = d.squaredNorm();
        double u = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        best = std::min(best, (p - a - u * d).squaredNorm());
    }
    return std::sqrt(best);
}

}  // namespace

OdeResult integrate_regularized(const PwsModel& model, const Regularization& reg,
                                const RegularizedContext& ctx, const Vec2& z0, double t_end,
                                const std::vector<EventSpec>& events, const Tolerances& tol,
                                bool record) {
    if (!(ctx.eps > 0)) throw std::invalid_argument("integrate_regularized: eps must be > 0");
    OdeOptions opt = regularized_options(ctx, tol, record);
    opt.t_max = std::abs(t_end);
    OdeIntegrator ode(
        [&](double, const StateVec& s, StateVec& ds) {
            const Vec2 f = eval_regularized(model, reg, ctx, {s[0], s[1]});
            ds[0] = f[0];
            ds[1] = f[1];
        },
        opt);
    ode.set_jacobian([&](double, const StateVec& s, Eigen::MatrixXd& J) {
        J = jacobian_regularized(model, reg, ctx, {s[0], s[1]}).first;
    });
    ode.set_monitor([&](double, const StateVec& s) {
        return std::abs(s[0]) <= tol.box && std::abs(s[1]) <= tol.box;
    });
    StateVec s0(2);
    s0 << z0[0], z0[1];
    return ode.integrate(0.0, s0, t_end, events);
}

std::vector<Vec2> gamma_polyline(const SlidingCycle& cycle, int max_points) {
    std::vector<Vec2> poly;
    const auto& orbit = cycle.half_map.orbit;
    if (orbit.empty())
        throw std::invalid_argument("gamma_polyline: cycle was built without its orbit recorded");
    const size_t stride = std::max<size_t>(1, orbit.size() / std::max(8, max_points - 8));
    for (size_t i = 0; i < orbit.size(); i += stride) poly.push_back({orbit[i].x, orbit[i].y});
    poly.push_back({cycle.eta_minus, 0.0});
    // Sliding segment back to eta+ closes the curve.
    const int n_slide = 16;
    for (int i = 1; i <= n_slide; ++i) {
        const double x = cycle.eta_minus + (cycle.eta_plus - cycle.eta_minus) * i / n_slide;
        poly.push_back({x, 0.0});
    }
    return poly;
}

ReturnMapSample return_map(const PwsModel& model, const Regularization& reg,
                           const ReturnMapSpec& spec, double y0,
                           const std::vector<Vec2>& gamma, const Tolerances& tol) {
    if (!(spec.ctx.eps > 0)) throw std::invalid_argument("return_map: eps must be > 0");
    if (!(y0 >= spec.sigma1 && y0 <= spec.sigma2))
        throw std::invalid_argument("return_map: y0 outside [sigma1, sigma2]");

    OdeOptions opt = regularized_options(spec.ctx, tol, false);
    // Explicit stepping only: the A-stable stepper damps the repelling layer
    // mode below abs_tol, freezing orbits onto unstable sliding segments and
    // corner saddles instead of letting them eject.
    opt.stiff_threshold = 0.0;
    std::string abort_reason;
    OdeIntegrator ode(
        [&](double, const StateVec& s, StateVec& ds) {
            const Vec2 z{s[0], s[1]};
            const Vec2 f = eval_regularized(model, reg, spec.ctx, z);
            const Mat2 J = jacobian_regularized(model, reg, spec.ctx, z).first;
            ds[0] = f[0];
            ds[1] = f[1];
            ds[2] = J(0, 0) * s[2] + J(0, 1) * s[3];
            ds[3] = J(1, 0) * s[2] + J(1, 1) * s[3];
            ds[4] = J(0, 0) * s[4] + J(0, 1) * s[5];
            ds[5] = J(1, 0) * s[4] + J(1, 1) * s[5];
        },
        opt);
    ode.set_jacobian([&](double, const StateVec& s, Eigen::MatrixXd& J6) {
        const Mat2 J = jacobian_regularized(model, reg, spec.ctx, {s[0], s[1]}).first;
        J6.setZero(6, 6);
        J6.topLeftCorner<2, 2>() = J;
        J6.block<2, 2>(2, 2) = J;
        J6.block<2, 2>(4, 4) = J;
    });
    // A near-cycle orbit crosses the fold region in O(1) time and never stops;
    // orbits that stall (numerical equilibrium at a corner saddle, phi rounding
    // flat at lambda = 0) or circulate in microscopic crossing loops at the
    // two-fold will never return and would otherwise eat the whole budget.
    double ball_entry = -1.0, mark_t = 0.0;
    Vec2 mark_z{0.0, y0};
    ode.set_monitor([&, ball_entry, mark_t, mark_z](double t, const StateVec& s) mutable {
        const Vec2 z{s[0], s[1]};
        if (dist_to_polyline(z, gamma) > tol.delta_hausdorff) {
            abort_reason = "left cycle neighborhood";
            return false;
        }
        if (z.norm() < 0.25) {
            if (ball_entry < 0) ball_entry = t;
            else if (t - ball_entry > 0.1 * opt.t_max) {
                abort_reason = "trapped near the two-fold";
                return false;
            }
        } else {
            ball_entry = -1.0;
        }
        if (t - mark_t > 100.0) {
            if ((z - mark_z).norm() < 1e-9) {
                abort_reason = "converged to an equilibrium";
                return false;
            }
            mark_t = t;
            mark_z = z;
        }
        return true;
    });

    const double span = spec.sigma2 - spec.sigma1;
    EventSpec ev;
    ev.g = [](double, const StateVec& s) { return s[0]; };
    ev.direction = -1;
    ev.terminal = true;
    ev.accept = [&](double t, const StateVec& s) {
        return t > 1e-2 && s[1] < 0 && s[1] > spec.sigma1 - 0.5 * span &&
               s[1] < spec.sigma2 + 0.5 * span;
    };

    StateVec s0(6);
    s0 << 0.0, y0, 1.0, 0.0, 0.0, 1.0;
    OdeResult r = ode.integrate(0.0, s0, opt.t_max, {ev});
    if (r.status == OdeStatus::Aborted) throw std::runtime_error("return_map: " + abort_reason);
    if (r.status != OdeStatus::EventHit)
        throw std::runtime_error("return_map: no return to the section within the time budget");

    ReturnMapSample out;
    out.P = r.y[1];
    out.transit_time = r.t;
    const Vec2 f = eval_regularized(model, reg, spec.ctx, {r.y[0], r.y[1]});
    if (std::abs(f[0]) < 1e-13)
        throw std::runtime_error("return_map: tangential section crossing");
    // Push (0,1) through the monodromy, project onto {x=0} along the flow.
    out.slope = r.y[5] - f[1] * r.y[4] / f[0];
    return out;
}

LimitCycleReport count_limit_cycles(const PwsModel& model, const Regularization& reg,
                                    const ReturnMapSpec& spec, const std::vector<Vec2>& gamma,
                                    int grid, const Tolerances& tol) {
    LimitCycleReport rep;
    rep.eps = spec.ctx.eps;
    rep.lambda_tilde = spec.ctx.lambda_tilde;
    rep.grid = grid;

    auto displacement = [&](double y) -> std::optional<double> {
        try {
            return return_map(model, reg, spec, y, gamma, tol).P - y;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    std::vector<double> ys(grid), ds(grid);
    std::vector<bool> ok(grid);
    for (int i = 0; i < grid; ++i) {
        ys[i] = spec.sigma1 + (spec.sigma2 - spec.sigma1) * i / (grid - 1);
        auto d = displacement(ys[i]);
        ok[i] = d.has_value();
        if (ok[i]) {
            ds[i] = *d;
            ++rep.evaluated;
        }
    }

    for (int i = 0; i + 1 < grid; ++i) {
        if (!ok[i] || !ok[i + 1]) continue;
        if ((ds[i] > 0) == (ds[i + 1] > 0)) {
            // Same-sign cell: probe the midpoint for a hidden double crossing.
            auto dm = displacement(0.5 * (ys[i] + ys[i + 1]));
            if (dm && (*dm > 0) != (ds[i] > 0))
                throw std::runtime_error(
                    "count_limit_cycles: two sign changes inside one grid cell; refine the grid");
            continue;
        }
        double a = ys[i], b = ys[i + 1], fa = ds[i];
        while (b - a > 1e-9) {
            const double m = 0.5 * (a + b);
            auto fm = displacement(m);
            if (!fm) break;
            if ((*fm > 0) == (fa > 0)) {
                a = m;
                fa = *fm;
            } else {
                b = m;
            }
        }
        const double ystar = 0.5 * (a + b);
        ReturnMapSample s = return_map(model, reg, spec, ystar, gamma, tol);
        if (std::abs(s.P - ystar) >= 1e-9) continue;  // bisection stalled off a true root
        // Genuine periodicity: one more return stays put.
        ReturnMapSample s2 = return_map(model, reg, spec, s.P, gamma, tol);
        if (std::abs(s2.P - s.P) > 1e-7) continue;
        FixedPoint fp;
        fp.y_star = ystar;
        fp.slope = s.slope;
        fp.attracting = s.slope < 1.0;
        rep.fixed_points.push_back(fp);
    }
    rep.count = static_cast<int>(rep.fixed_points.size());
    return rep;
}

// ---- Blow-up charts ----

double BlowupChartModel::y_C(double x2) const {
    const FieldEval up = model.upper.eval(x2, 0);
    const FieldEval lo = model.lower.eval(x2, 0);
    const double u = -lo.Y / (up.Y - lo.Y);
    if (!(u > 0 && u < 1))
        throw std::domain_error("y_C: point outside the sliding region");
    return reg.inv(u);
}

double BlowupChartModel::y2_star() const {
    const FieldEval up = model.upper.eval(0, 0);
    const FieldEval lo = model.lower.eval(0, 0);
    const double u = -lo.dYdx / (up.dYdx - lo.dYdx);
    return reg.inv(u);
}

Eigen::VectorXd chart_field(const BlowupChartModel& chart, const Eigen::VectorXd& s) {
    const PwsModel& m = chart.model;
    const Regularization& reg = chart.reg;
    Eigen::VectorXd ds;
    switch (chart.tag) {
        case ChartTag::Family: {
            const double x2 = s[0], y2 = s[1], r2 = s[2];
            if (r2 < 0) throw std::domain_error("family chart: r2 >= 0 required");
            const double lambda = r2 * chart.lambda_tilde;
            const double u = reg.phi(y2);
            const FieldEval up = m.upper.eval(x2, r2 * r2 * y2, lambda);
            const FieldEval lo = m.lower.eval(x2, r2 * r2 * y2, lambda);
            ds.resize(3);
            ds[0] = r2 * r2 * (up.X * u + lo.X * (1.0 - u));
            ds[1] = up.Y * u + lo.Y * (1.0 - u);
            ds[2] = 0.0;
            return ds;
        }
        case ChartTag::Family0: {
            const double x2 = s[0], y2 = s[1];
            const double u = reg.phi(y2);
            const FieldEval up = m.upper.eval(x2, 0);
            const FieldEval lo = m.lower.eval(x2, 0);
            ds.resize(2);
            ds[0] = 0.0;
            ds[1] = up.Y * u + lo.Y * (1.0 - u);
            return ds;
        }
        case ChartTag::Phase: {
            const double x1 = s[0], r1 = s[1], e1 = s[2];
            const double lambda = r1 * e1 * chart.lambda_tilde;
            const double u = reg.phi_minus(e1 * e1);
            const FieldEval up = m.upper.eval(x1, -r1 * r1, lambda);
            const FieldEval lo = m.lower.eval(x1, -r1 * r1, lambda);
            const double Yb = up.Y * u + lo.Y * (1.0 - u);
            ds.resize(3);
            ds[0] = r1 * r1 * (up.X * u + lo.X * (1.0 - u));
            ds[1] = -0.5 * r1 * Yb;
            ds[2] = 0.5 * e1 * Yb;
            return ds;
        }
        case ChartTag::SecondFamily: {
            const double xh2 = s[0], y2 = s[1];
            const double u = reg.phi(y2);
            const FieldEval up = m.upper.eval(0, 0);
            const FieldEval lo = m.lower.eval(0, 0);
            ds.resize(2);
            ds[0] = up.X * u + lo.X * (1.0 - u);
            ds[1] = xh2 * (up.dYdx * u + lo.dYdx * (1.0 - u));
            return ds;
        }
    }
    throw std::logic_error("unreachable chart tag");
}

Eigen::Vector3d phase_edge_eigenvalues(const BlowupChartModel& chart, double x1) {
    BlowupChartModel ph = chart;
    ph.tag = ChartTag::Phase;
    Eigen::Matrix3d J;
    Eigen::Vector3d base{x1, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            J(i, j) = richardson_derivative(
                          [&](double v) {
                              Eigen::Vector3d p = base;
                              p[j] = v;
                              return chart_field(ph, p)[i];
                          },
                          base[j], 1, 1e-2)
                          .value;
        }
    }
    Eigen::EigenSolver<Eigen::Matrix3d> es(J);
    Eigen::Vector3d ev = es.eigenvalues().real();
    std::sort(ev.data(), ev.data() + 3);
    return ev;
}

SlowDynamicsResult slow_dynamics_check(const PwsModel& model, const Regularization& reg,
                                       double x_lo, double x_hi, double r2,
                                       double lambda_tilde, int samples, const Tolerances& tol) {
    if (!(r2 > 0)) throw std::invalid_argument("slow_dynamics_check: r2 must be > 0");
    BlowupChartModel chart;
    chart.tag = ChartTag::Family;
    chart.model = model;
    chart.reg = reg;
    chart.lambda_tilde = lambda_tilde;

    SlowDynamicsResult res;
    for (int k = 0; k < samples; ++k) {
        const double x = x_lo + (x_hi - x_lo) * k / (samples - 1);
        const FieldEval up = model.upper.eval(x, 0);
        const FieldEval lo = model.lower.eval(x, 0);
        const double dY = up.Y - lo.Y;
        const double u = -lo.Y / dY;
        if (!(u > 0 && u < 1))
            throw std::runtime_error("slow_dynamics_check: sample outside the sliding region");
        const double yC = reg.inv(u);
        const double eig = dY * reg.dphi(yC);  // transverse eigenvalue of the layer
        if (std::abs(eig) < 1e-6)
            throw std::runtime_error("slow_dynamics_check: normal hyperbolicity lost at x = " +
                                     std::to_string(x));
        const double dir = eig < 0 ? 1.0 : -1.0;  // integrate toward the manifold

        OdeOptions opt;
        opt.abs_tol = tol.ode_abs;
        opt.rel_tol = tol.ode_rel;
        opt.t_max = 10.0;
        OdeIntegrator ode(
            [&](double, const StateVec& s, StateVec& ds) {
                const Eigen::VectorXd f = chart_field(chart, (Eigen::VectorXd(3) << s[0], s[1],
                                                              r2)
                                                                 .finished());
                ds[0] = f[0];
                ds[1] = f[1];
            },
            opt);
        StateVec s0(2);
        s0 << x, yC;
        const double t1 = dir * 0.5, t2 = dir * 1.5;
        OdeResult ra = ode.integrate(0.0, s0, t1);
        if (ra.status != OdeStatus::ReachedTEnd)
            throw std::runtime_error("slow_dynamics_check: settle integration failed");
        OdeResult rb = ode.integrate(t1, ra.y, t2);
        if (rb.status != OdeStatus::ReachedTEnd)
            throw std::runtime_error("slow_dynamics_check: drift integration failed");

        const double drift = (rb.y[0] - ra.y[0]) / (t2 - t1);  // signed, forward family time
        const double measured = drift / (r2 * r2);
        const double x_mid = 0.5 * (ra.y[0] + rb.y[0]);
        const double expected = sliding_vf(model, x_mid, tol);
        const double dev = std::abs(measured - expected) / std::abs(expected);
        if (dev > res.max_rel_deviation) {
            res.max_rel_deviation = dev;
            res.at_x = x;
        }
    }
    return res;
}

double gamma_invariance_check(const PwsModel& model, const Regularization& reg, double offset,
                              double range, int samples) {
    BlowupChartModel chart;
    chart.tag = ChartTag::SecondFamily;
    chart.model = model;
    chart.reg = reg;
    const double y2 = chart.y2_star() + offset;
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        const double xh = -range + 2.0 * range * i / (samples - 1);
        const Eigen::VectorXd f = chart_field(chart, (Eigen::VectorXd(2) << xh, y2).finished());
        worst = std::max(worst, std::abs(f[1]));
    }
    return worst;
}

}  // namespace slidecyc
