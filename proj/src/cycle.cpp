#include "slidecyc/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slidecyc/ode.hpp"

namespace slidecyc {

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::I: return "I";
        case CaseTag::II: return "II";
        case CaseTag::III: return "III";
        case CaseTag::IV: return "IV";
        case CaseTag::V: return "V";
        case CaseTag::V_Mirror: return "V (mirror)";
        case CaseTag::VI: return "VI";
        case CaseTag::VII: return "VII";
        case CaseTag::VIII: return "VIII";
        case CaseTag::Excluded: return "excluded (no limit cycles possible)";
        case CaseTag::Uncovered: return "uncovered";
    }
    return "?";
}

std::optional<SlidingZero> SlidingCycle::corner_minus() const {
    for (const auto& z : zeros)
        if (z.position == ZeroPosition::CornerMinus) return z;
    return std::nullopt;
}

std::optional<SlidingZero> SlidingCycle::corner_plus() const {
    for (const auto& z : zeros)
        if (z.position == ZeroPosition::CornerPlus) return z;
    return std::nullopt;
}

std::vector<SlidingZero> SlidingCycle::interior_zeros() const {
    std::vector<SlidingZero> out;
    for (const auto& z : zeros)
        if (z.position == ZeroPosition::Interior) out.push_back(z);
    return out;
}

bool SlidingCycle::has_interior_zero_in(double a, double b) const {
    for (const auto& z : zeros)
        if (z.position == ZeroPosition::Interior && z.x0 > a && z.x0 < b) return true;
    return false;
}

namespace {

// State: (x, y, M11, M21, M12, M22, int div).
constexpr int kDim = 7;

OdeIntegrator make_lower_integrator(const SmoothField& lower, const Tolerances& tol,
                                    std::string& abort_reason) {
    OdeOptions opt;
    opt.abs_tol = tol.ode_abs;
    opt.rel_tol = tol.ode_rel;
    opt.event_tol = tol.event_tol;
    opt.t_max = tol.t_max;
    opt.record_orbit = true;
    OdeIntegrator ode(
        [&lower](double, const StateVec& s, StateVec& ds) {
            const FieldEval e = lower.eval(s[0], s[1]);
            ds[0] = e.X;
            ds[1] = e.Y;
            ds[2] = e.dXdx * s[2] + e.dXdy * s[3];
            ds[3] = e.dYdx * s[2] + e.dYdy * s[3];
            ds[4] = e.dXdx * s[4] + e.dXdy * s[5];
            ds[5] = e.dYdx * s[4] + e.dYdy * s[5];
            ds[6] = e.divergence();
        },
        opt);
    ode.set_monitor([&lower, &tol, &abort_reason](double, const StateVec& s) {
        if (std::abs(s[0]) > tol.box || std::abs(s[1]) > tol.box) {
            abort_reason = "A3 violated: orbit left bounding box";
            return false;
        }
        const FieldEval e = lower.eval(s[0], s[1]);
        if (e.value().norm() < 1e-13) {
            abort_reason = "A3 violated (singular encounter)";
            return false;
        }
        return true;
    });
    return ode;
}

void append_orbit(std::vector<OrbitPoint>& orbit, const OdeResult& leg) {
    for (size_t i = 0; i < leg.times.size(); ++i) {
        if (!orbit.empty() && leg.times[i] <= orbit.back().t) continue;
        orbit.push_back({leg.times[i], leg.states[i][0], leg.states[i][1]});
    }
}

}  // namespace

HalfMapResult half_map(const PwsModel& model, double x, const HalfMapOptions& opts) {
    if (!(x > 0)) throw std::invalid_argument("half_map: requires x > 0");
    const SmoothField& lower = model.lower;
    const Tolerances& tol = opts.tol;
    if (lower.eval(x, 0.0).Y >= 0)
        throw std::invalid_argument("half_map: Y-(x,0) >= 0, orbit does not enter {y<0}");

    std::string abort_reason;
    OdeIntegrator ode = make_lower_integrator(lower, tol, abort_reason);

    StateVec s(kDim);
    s << x, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0;

    // Leg 1: to the section {x = 0}, crossing leftward; records s0.
    EventSpec cross_x0;
    cross_x0.g = [](double, const StateVec& y) { return y[0]; };
    cross_x0.direction = -1;
    cross_x0.terminal = true;
    OdeResult leg1 = ode.integrate(0.0, s, tol.t_max, {cross_x0});
    auto fail = [&](const OdeResult& r) -> std::string {
        if (r.status == OdeStatus::Aborted) return abort_reason;
        if (r.status == OdeStatus::ReachedTEnd || r.status == OdeStatus::MaxSteps)
            return "half_map timeout: no return to {y=0} within T_max";
        return "half_map integration failure: " + r.message;
    };
    if (leg1.status != OdeStatus::EventHit) throw std::runtime_error(fail(leg1));

    HalfMapResult out;
    out.s0_candidate = leg1.y[1];

    // Leg 2: continue to the return crossing of {y = 0} in {x < 0}.
    EventSpec cross_y0;
    cross_y0.g = [](double, const StateVec& y) { return y[1]; };
    cross_y0.direction = +1;
    cross_y0.terminal = true;
    cross_y0.accept = [](double, const StateVec& y) { return y[0] < 0; };
    OdeResult leg2 = ode.integrate(leg1.t, leg1.y, tol.t_max, {cross_y0});
    if (leg2.status != OdeStatus::EventHit) throw std::runtime_error(fail(leg2));

    const StateVec& f = leg2.y;
    out.x_out = f[0];
    out.transit_time = leg2.t;
    out.div_integral = f[6];

    // Pi'(x): push the section tangent (1,0) through the monodromy and project
    // back onto {y=0} along the flow.
    const FieldEval e_out = lower.eval(f[0], 0.0);
    if (std::abs(e_out.Y) < 1e-13)
        throw std::runtime_error("half_map: tangential landing, Y-(Pi(x),0) = 0");
    out.derivative = f[2] - e_out.X * f[3] / e_out.Y;

    const double Y_in = lower.eval(x, 0.0).Y;
    out.derivative_lemma3 = (Y_in / e_out.Y) * std::exp(f[6]);
    out.derivative_agreement =
        std::abs(out.derivative - out.derivative_lemma3) <=
        1e-6 * std::max({1e-12, std::abs(out.derivative), std::abs(out.derivative_lemma3)});

    if (opts.record_orbit) {
        append_orbit(out.orbit, leg1);
        append_orbit(out.orbit, leg2);
        if (out.orbit.empty() || out.orbit.back().t < leg2.t)
            out.orbit.push_back({leg2.t, f[0], f[1]});
        // Endpoints sit on the switching line up to the event tolerance.
        out.orbit.front() = {0.0, x, 0.0};
        out.orbit.back() = {leg2.t, f[0], 0.0};
    }
    return out;
}

SlidingCycle build_cycle(const PwsModel& model, double eta_plus, const HalfMapOptions& opts) {
    SlidingCycle cyc;
    cyc.eta_plus = eta_plus;
    cyc.half_map = half_map(model, eta_plus, opts);
    cyc.eta_minus = cyc.half_map.x_out;
    cyc.s0 = cyc.half_map.s0_candidate;

    const Tolerances& tol = opts.tol;
    const double delta = 10.0 * tol.tau_sw;

    // Corner zeros first; interior search then stays clear of detected ones.
    auto corner = [&](double eta, ZeroPosition pos) -> std::optional<SlidingZero> {
        const double v = std::abs(sliding_vf(model, eta, tol));
        if (v < tol.tau_mult) {
            SlidingZero z = zero_with_multiplicity(model, eta, tol);
            z.position = pos;
            return z;
        }
        if (v < 10.0 * tol.tau_mult)
            throw std::runtime_error("indeterminate corner at x = " + std::to_string(eta) +
                                     ": |X^sl| within [tau_mult, 10 tau_mult]; tighten tolerances");
        return std::nullopt;
    };
    auto cm = corner(cyc.eta_minus, ZeroPosition::CornerMinus);
    auto cp = corner(eta_plus, ZeroPosition::CornerPlus);
    if (cm) cyc.zeros.push_back(*cm);

    const double span = eta_plus - cyc.eta_minus;
    const double excl = 1e-6 * span;
    const double lo = cyc.eta_minus + (cm ? excl : 0.0);
    const double hi = eta_plus - (cp ? excl : 0.0);
    auto add_interior = [&](double a, double b) {
        if (!(a < b)) return;
        for (SlidingZero z : find_sliding_zeros(model, a, b, tol)) {
            z.position = ZeroPosition::Interior;
            cyc.zeros.push_back(z);
        }
    };
    add_interior(lo, -delta);
    add_interior(delta, hi);
    if (cp) cyc.zeros.push_back(*cp);

    std::sort(cyc.zeros.begin(), cyc.zeros.end(),
              [](const SlidingZero& a, const SlidingZero& b) { return a.x0 < b.x0; });
    return cyc;
}

CaseLabel classify_case(const PwsModel& model, const SlidingCycle& cycle, const Tolerances& tol) {
    (void)model;
    (void)tol;
    const auto cm = cycle.corner_minus();
    const auto cp = cycle.corner_plus();
    const auto interior = cycle.interior_zeros();

    for (const auto& z : interior)
        if (!z.even_parity)
            return {CaseTag::Excluded,
                    "odd-multiplicity interior sliding zero at x = " + std::to_string(z.x0)};

    if (!cm && !cp) {
        if (interior.empty()) return {CaseTag::I, "no sliding zeros on [eta-, eta+]"};
        return {CaseTag::II, "even interior zeros only, corners regular"};
    }
    if (cm && !cp) {
        if (!cycle.has_interior_zero_in(0.0, cycle.eta_plus))
            return {CaseTag::III, "corner zero at eta-, unstable sliding interval regular"};
        return {CaseTag::V, "corner zero at eta- with interior zeros in (0, eta+)"};
    }
    if (cp && !cm) {
        if (!cycle.has_interior_zero_in(cycle.eta_minus, 0.0))
            return {CaseTag::IV, "corner zero at eta+, stable sliding interval regular"};
        return {CaseTag::V_Mirror, "corner zero at eta+ with interior zeros in (eta-, 0)"};
    }

    // Both corners singular.
    if (cm->at_least_m_max && cp->at_least_m_max)
        return {CaseTag::Uncovered, "both corner multiplicities clamped at m_max"};
    if (cm->multiplicity != cp->multiplicity)
        return {CaseTag::VI, "corner zeros with distinct multiplicities"};
    if (cm->multiplicity > 1)
        return {CaseTag::Uncovered, "equal corner multiplicities m- = m+ > 1"};
    if (interior.empty())
        return {CaseTag::VII, "simple corner zeros, no interior zeros"};
    return {CaseTag::VIII, "simple corner zeros with even interior zeros"};
}

}  // namespace slidecyc
