#include "slidecyc/ode.hpp"

#include <algorithm>
#include <cmath>

namespace slidecyc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double ros_d = 0.2928932188134524756;  // 1/(2+sqrt(2))
constexpr double ros_e32 = 7.4142135623730950488; // 6+sqrt(2)

struct Stepper {
    const OdeIntegrator::Rhs& rhs;
    const OdeIntegrator::Jac& jac;
    int n;
    StateVec k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;
    Eigen::MatrixXd J, W;

    Stepper(const OdeIntegrator::Rhs& r, const OdeIntegrator::Jac& j, int dim)
        : rhs(r), jac(j), n(dim) {
        k1 = k2 = k3 = k4 = k5 = k6 = k7 = ytmp = yerr = StateVec::Zero(n);
        J = W = Eigen::MatrixXd::Zero(n, n);
    }

    // One DP5 step from (t, y) with derivative f0 at y; fills y1, f1 (FSAL),
    // err (unscaled error vector).
    void dopri5(double t, const StateVec& y, const StateVec& f0, double h, StateVec& y1,
                StateVec& f1, StateVec& err) {
        ytmp = y + h * (a21 * f0);
        rhs(t + h / 5, ytmp, k2);
        ytmp = y + h * (a31 * f0 + a32 * k2);
        rhs(t + 3 * h / 10, ytmp, k3);
        ytmp = y + h * (a41 * f0 + a42 * k2 + a43 * k3);
        rhs(t + 4 * h / 5, ytmp, k4);
        ytmp = y + h * (a51 * f0 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + 8 * h / 9, ytmp, k5);
        ytmp = y + h * (a61 * f0 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        y1 = y + h * (b1 * f0 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, y1, f1);
        err = h * (e1 * f0 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * f1);
    }

    // One linearly implicit Rosenbrock 2(3) step (Shampine-Reichelt ode23s).
    void rosenbrock(double t, const StateVec& y, const StateVec& f0, double h, StateVec& y1,
                    StateVec& f1, StateVec& err) {
        jac(t, y, J);
        W = Eigen::MatrixXd::Identity(n, n) - (h * ros_d) * J;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
        k1 = lu.solve(f0);
        ytmp = y + 0.5 * h * k1;
        rhs(t + 0.5 * h, ytmp, k4);  // k4 holds f1-stage value
        k2 = lu.solve(k4 - k1) + k1;
        y1 = y + h * k2;
        rhs(t + h, y1, f1);
        k3 = lu.solve(f1 - ros_e32 * (k2 - k4) - 2.0 * (k1 - f0));
        err = (h / 6.0) * (k1 - 2.0 * k2 + k3);
    }

    // Single step without error control, for event polishing.
    void raw_step(double t, const StateVec& y, const StateVec& f0, double h, bool stiff,
                  StateVec& y1) {
        StateVec f1_l = StateVec::Zero(n), err_l = StateVec::Zero(n);
        if (stiff)
            rosenbrock(t, y, f0, h, y1, f1_l, err_l);
        else
            dopri5(t, y, f0, h, y1, f1_l, err_l);
    }
};

double error_norm(const StateVec& err, const StateVec& y0, const StateVec& y1, double atol,
                  double rtol) {
    double acc = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / double(err.size()));
}

StateVec hermite(double theta, double h, const StateVec& y0, const StateVec& f0,
                 const StateVec& y1, const StateVec& f1) {
    const StateVec dy = y1 - y0;
    return (1 - theta) * y0 + theta * y1 +
           theta * (theta - 1) * ((1 - 2 * theta) * dy + (theta - 1) * h * f0 + theta * h * f1);
}

}  // namespace

OdeResult OdeIntegrator::integrate(double t0, const StateVec& y0, double t_end,
                                   const std::vector<EventSpec>& events) {
    const int n = static_cast<int>(y0.size());
    Stepper st(rhs_, jac_, n);
    OdeResult res;
    res.y = y0;
    res.t = t0;

    const double dir = t_end >= t0 ? 1.0 : -1.0;
    double t = t0;
    StateVec y = y0, f0(n), y1(n), f1(n), err(n);
    rhs_(t, y, f0);
    double h = dir * std::clamp(opt_.h_init, opt_.h_min, opt_.h_max);

    std::vector<double> g_prev(events.size());
    for (size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(t, y);

    double last_record = t - dir;  // force first record
    auto record = [&](double tt, const StateVec& yy) {
        if (!opt_.record_orbit) return;
        if (opt_.record_dt > 0 && std::abs(tt - last_record) < opt_.record_dt) return;
        res.times.push_back(tt);
        res.states.push_back(yy);
        last_record = tt;
    };
    record(t, y);

    while (dir * (t_end - t) > 1e-15 * (1.0 + std::abs(t))) {
        if (res.steps_accepted + res.steps_rejected >= opt_.max_steps) {
            res.status = OdeStatus::MaxSteps;
            res.t = t;
            res.y = y;
            return res;
        }
        if (monitor_ && !monitor_(t, y)) {
            res.status = OdeStatus::Aborted;
            res.t = t;
            res.y = y;
            return res;
        }
        if (std::abs(h) > dir * (t_end - t)) h = t_end - t;

        bool stiff = false;
        if (jac_ && opt_.stiff_threshold > 0) {
            st.jac(t, y, st.J);
            const double rho = st.J.cwiseAbs().rowwise().sum().maxCoeff();
            stiff = rho > opt_.stiff_threshold;
        }

        if (stiff)
            st.rosenbrock(t, y, f0, h, y1, f1, err);
        else
            st.dopri5(t, y, f0, h, y1, f1, err);

        const double en = error_norm(err, y, y1, opt_.abs_tol, opt_.rel_tol);
        const double order_exp = stiff ? 1.0 / 3.0 : 1.0 / 5.0;
        if (en > 1.0) {
            ++res.steps_rejected;
            h *= std::max(0.1, 0.9 * std::pow(en, -order_exp));
            if (std::abs(h) < opt_.h_min) {
                res.status = OdeStatus::StepUnderflow;
                res.t = t;
                res.y = y;
                res.message = "step-size underflow at t=" + std::to_string(t);
                return res;
            }
            continue;
        }
        ++res.steps_accepted;
        if (stiff) ++res.stiff_steps;
        const double t1 = t + h;

        // Event scan on the Hermite interpolant over sub-intervals.
        bool terminal_hit = false;
        double hit_theta = 2.0;
        int hit_index = -1;
        double hit_t = 0;
        StateVec hit_y;
        for (size_t ie = 0; ie < events.size(); ++ie) {
            const auto& ev = events[ie];
            const double g_end = ev.g(t1, y1);
            const double g_start = g_prev[ie];
            g_prev[ie] = g_end;
            const bool endpoint_cross =
                (g_start <= 0 && g_end > 0 && ev.direction >= 0) ||
                (g_start >= 0 && g_end < 0 && ev.direction <= 0) ||
                (g_start < 0 && g_end >= 0 && ev.direction >= 0) ||
                (g_start > 0 && g_end <= 0 && ev.direction <= 0);
            if (!endpoint_cross || g_start == g_end) continue;
            constexpr int kScan = 8;
            double th_a = 0.0;
            double ga = g_start;
            for (int ss = 1; ss <= kScan; ++ss) {
                const double th_b = double(ss) / kScan;
                const StateVec yb =
                    ss == kScan ? y1 : hermite(th_b, h, y, f0, y1, f1);
                const double gb = ev.g(t + th_b * h, yb);
                const bool crossed =
                    (ga <= 0 && gb > 0 && ev.direction >= 0) ||
                    (ga >= 0 && gb < 0 && ev.direction <= 0) ||
                    (ga < 0 && gb >= 0 && ev.direction >= 0) ||
                    (ga > 0 && gb <= 0 && ev.direction <= 0);
                if (crossed && ga != gb) {
                    // Refine on true sub-step integration from (t, y).
                    double lo = th_a, hi = th_b, glo = ga, ghi = gb;
                    double tm = 0;
                    StateVec ym = y;
                    double gm = 0;
                    for (int it = 0; it < 80; ++it) {
                        double thm;
                        // secant, guarded by bisection
                        thm = (glo != ghi) ? lo - glo * (hi - lo) / (ghi - glo)
                                            : 0.5 * (lo + hi);
                        if (!(thm > lo + 1e-17 && thm < hi - 1e-17)) thm = 0.5 * (lo + hi);
                        tm = t + thm * h;
                        if (thm == 0.0) {
                            ym = y;
                        } else {
                            st.raw_step(t, y, f0, thm * h, stiff, ym);
                        }
                        gm = ev.g(tm, ym);
                        if (std::abs(gm) <= opt_.event_tol || hi - lo < 1e-16) break;
                        if ((gm > 0) == (ghi > 0)) {
                            hi = thm;
                            ghi = gm;
                        } else {
                            lo = thm;
                            glo = gm;
                        }
                    }
                    const double theta_hit = (tm - t) / h;
                    if (!ev.accept || ev.accept(tm, ym)) {
                        if (ev.terminal) {
                            if (theta_hit < hit_theta) {
                                terminal_hit = true;
                                hit_theta = theta_hit;
                                hit_index = static_cast<int>(ie);
                                hit_t = tm;
                                hit_y = ym;
                            }
                            break;  // earliest crossing of this event found
                        }
                    }
                }
                th_a = th_b;
                ga = gb;
            }
        }
        if (terminal_hit) {
            record(hit_t, hit_y);
            res.status = OdeStatus::EventHit;
            res.t = hit_t;
            res.y = hit_y;
            res.event_index = hit_index;
            return res;
        }

        t = t1;
        y.swap(y1);
        f0.swap(f1);
        record(t, y);
        h = dir * std::min(opt_.h_max,
                           std::abs(h) * std::clamp(0.9 * std::pow(std::max(en, 1e-10), -order_exp),
                                                    0.2, 5.0));
    }

    res.status = OdeStatus::ReachedTEnd;
    res.t = t;
    res.y = y;
    record(t, y);
    return res;
}

}  // namespace slidecyc
