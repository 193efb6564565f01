#include "slidecyc/cyclicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slidecyc/derivatives.hpp"
#include "slidecyc/filippov.hpp"

namespace slidecyc {

namespace {

double sliding_slope(const PwsModel& model, double x0, const Tolerances& tol) {
    const FieldEval up = model.upper.eval(x0, 0);
    const FieldEval lo = model.lower.eval(x0, 0);
    const double dY = up.Y - lo.Y;
    if (model.upper.is_polynomial() && model.lower.is_polynomial())
        return det_Z_poly(model).derivative()(x0) / dY;
    return richardson_derivative([&](double x) { return sliding_vf(model, x, tol); }, x0, 1)
        .value;
}

}  // namespace

double corner_rho(const PwsModel& model, const Regularization& reg, double x0,
                  const Tolerances& tol) {
    const SlidingZero z = zero_with_multiplicity(model, x0, tol);
    if (z.multiplicity != 1 || z.at_least_m_max)
        throw std::runtime_error("rho undefined: x0 is not a simple zero of X^sl");
    const FieldEval up = model.upper.eval(x0, 0);
    const FieldEval lo = model.lower.eval(x0, 0);
    const double dY = up.Y - lo.Y;
    const double u = -lo.Y / dY;
    if (!(u > 0 && u < 1))
        throw std::runtime_error("rho undefined: corner is outside the sliding region");
    const double fast = dY * reg.dphi(reg.inv(u));
    return std::abs(sliding_slope(model, x0, tol)) / std::abs(fast);
}

RhoValidation validate_corner_rho(const PwsModel& model, const Regularization& reg, double x0,
                                  double rho, double eps, const Tolerances& tol) {
    RegularizedContext ctx;
    ctx.eps = eps;
    const FieldEval up = model.upper.eval(x0, 0);
    const FieldEval lo = model.lower.eval(x0, 0);
    const double u = -lo.Y / (up.Y - lo.Y);

    // Newton iteration for the equilibrium of the regularized field.
    Vec2 z{x0, eps * eps * reg.inv(u)};
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const Vec2 f = eval_regularized(model, reg, ctx, z);
        if (f.norm() < 1e-13) {
            converged = true;
            break;
        }
        const Mat2 J = jacobian_regularized(model, reg, ctx, z).first;
        z -= J.fullPivLu().solve(f);
    }
    RhoValidation v;
    v.saddle = z;
    v.predicted = -eps * eps * rho;
    if (!converged) {
        v.ok = false;
        v.rel_err = std::numeric_limits<double>::infinity();
        return v;
    }
    const Mat2 J = jacobian_regularized(model, reg, ctx, z).first;
    const double tr = J.trace(), det = J.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc <= 0 || det >= 0) {  // not a saddle
        v.ok = false;
        v.rel_err = std::numeric_limits<double>::infinity();
        return v;
    }
    const double sq = std::sqrt(disc);
    const double l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
    const double fast = std::abs(l1) > std::abs(l2) ? l1 : l2;
    const double slow = std::abs(l1) > std::abs(l2) ? l2 : l1;
    v.measured_ratio = slow / fast;
    v.rel_err = std::abs(v.measured_ratio - v.predicted) / std::abs(v.predicted);
    v.ok = v.rel_err <= 0.10;
    (void)tol;
    return v;
}

CornerSaddleData corner_saddle_data(const PwsModel& model, const Regularization& reg,
                                    const SlidingCycle& cycle, double validation_eps,
                                    const Tolerances& tol) {
    CornerSaddleData d;
    if (!cycle.corner_minus() || !cycle.corner_plus())
        throw std::runtime_error("corner_saddle_data: cycle lacks a corner zero");
    d.rho_minus = corner_rho(model, reg, cycle.eta_minus, tol);
    d.rho_plus = corner_rho(model, reg, cycle.eta_plus, tol);
    if (validation_eps > 0) {
        d.validated_minus =
            validate_corner_rho(model, reg, cycle.eta_minus, d.rho_minus, validation_eps, tol);
        d.validated_plus =
            validate_corner_rho(model, reg, cycle.eta_plus, d.rho_plus, validation_eps, tol);
    }
    return d;
}

std::string CyclicityVerdict::bound_string() const {
    switch (kind) {
        case Kind::Bound: return std::to_string(bound);
        case Kind::NoLimitCycles: return "no limit cycles";
        case Kind::Uncovered: return "uncovered";
    }
    return "?";
}

CyclicityVerdict cyclicity_bound(const CaseLabel& label, const SlidingCycle& cycle,
                                 const std::optional<SdiEvaluation>& sdi,
                                 const std::optional<CornerSaddleData>& saddle,
                                 const Tolerances& tol) {
    CyclicityVerdict v;
    auto need = [](const std::string& what) -> CyclicityVerdict {
        throw std::runtime_error("insufficient data: compute " + what);
    };

    switch (label.tag) {
        case CaseTag::I: {
            if (!sdi) return need("SdiEvaluation (I at eta+)");
            if (sdi->I.divergent)
                throw std::logic_error("Case I with divergent I: inconsistent inputs");
            const int m = sdi->mult_I_at_eta_plus.value_or(
                std::abs(sdi->I.value) > tol.tau_mult ? 0 : -1);
            if (m < 0) return need("multiplicity of I at eta+");
            if (m == 0) {
                v.bound = 1;
                v.stability = sdi->I.value < 0 ? Stability::Attracting : Stability::Repelling;
                v.theorem = "T0.1";
                v.inputs_used = "case I, sign of I(eta+)";
            } else {
                v.bound = m + 1;
                v.theorem = "T0.2";
                v.inputs_used = "case I, I zero of multiplicity m=" + std::to_string(m);
            }
            v.explanation = "regular sliding cycle; slow divergence integral decides";
            return v;
        }
        case CaseTag::II: {
            if (!sdi || !sdi->mult_dIdx_at_eta_plus)
                return need("multiplicity of dI/dx at eta+");
            const int m = *sdi->mult_dIdx_at_eta_plus;
            v.bound = 2 + m;
            v.theorem = "T1";
            v.inputs_used = "case II, mult of dI/dx at eta+ m=" + std::to_string(m);
            v.explanation = "even interior sliding zeros; pointwise dI/dx controls the count";
            return v;
        }
        case CaseTag::III:
            v.bound = 1;
            v.stability = Stability::Attracting;
            v.theorem = "T2.1";
            v.inputs_used = "case III";
            v.explanation = "corner zero at eta-, regular unstable sliding interval";
            return v;
        case CaseTag::IV:
            v.bound = 1;
            v.stability = Stability::Repelling;
            v.theorem = "T2.2";
            v.inputs_used = "case IV";
            v.explanation = "corner zero at eta+, regular stable sliding interval";
            return v;
        case CaseTag::V:
        case CaseTag::V_Mirror:
            v.bound = 2;
            v.theorem = "T2.3";
            v.inputs_used = "case V" + std::string(label.tag == CaseTag::V_Mirror ? " (mirror)" : "");
            v.explanation = "one corner zero with interior sliding zeros";
            return v;
        case CaseTag::VI: {
            const auto cm = cycle.corner_minus(), cp = cycle.corner_plus();
            if (!cm || !cp) return need("corner multiplicities m-, m+");
            const int m = std::min(cm->multiplicity, cp->multiplicity);
            v.bound = 2 + m;
            v.theorem = "T3";
            v.inputs_used = "case VI, m-=" + std::to_string(cm->multiplicity) +
                            ", m+=" + std::to_string(cp->multiplicity);
            v.explanation = "corner zeros of distinct multiplicities";
            return v;
        }
        case CaseTag::VII:
        case CaseTag::VIII: {
            if (!saddle) return need("CornerSaddleData (rho-, rho+)");
            v.inputs_used = "case " + to_string(label.tag) +
                            ", rho-=" + std::to_string(saddle->rho_minus) +
                            ", rho+=" + std::to_string(saddle->rho_plus);
            if (saddle->validation_failed()) {
                v.kind = CyclicityVerdict::Kind::Uncovered;
                v.explanation = "uncovered (rho unvalidated): saddle eigenvalue check failed";
                return v;
            }
            const double scale = std::max(std::abs(saddle->rho_minus), std::abs(saddle->rho_plus));
            if (std::abs(saddle->rho_minus - saddle->rho_plus) <= 1e-6 * scale) {
                v.kind = CyclicityVerdict::Kind::Uncovered;
                v.explanation = "rho- = rho+ within relative margin 1e-6";
                return v;
            }
            v.bound = label.tag == CaseTag::VII ? 2 : 3;
            v.theorem = label.tag == CaseTag::VII ? "T4.1" : "T4.2";
            v.explanation = "simple corner zeros with distinct saddle ratios";
            return v;
        }
        case CaseTag::Excluded:
            v.kind = CyclicityVerdict::Kind::NoLimitCycles;
            v.theorem = "exclusion";
            v.inputs_used = "odd interior sliding zero";
            v.explanation = label.detail;
            return v;
        case CaseTag::Uncovered:
            v.kind = CyclicityVerdict::Kind::Uncovered;
            v.inputs_used = "case classification";
            v.explanation = label.detail;
            return v;
    }
    throw std::logic_error("unreachable case tag");
}

}  // namespace slidecyc
