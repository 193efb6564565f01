#pragma once

#include <string>
#include <vector>

#include "slidecyc/model.hpp"

namespace slidecyc {

enum class SwitchTag { Crossing, StableSliding, UnstableSliding, Tangency };
enum class TangencySide { Above, Below, Both };
enum class Visibility { Visible, Invisible, Degenerate };

struct SwitchPointClass {
    SwitchTag tag;
    // Tangency only:
    TangencySide side = TangencySide::Above;
    Visibility visibility_above = Visibility::Degenerate;
    Visibility visibility_below = Visibility::Degenerate;
};

struct CertCondition {
    std::string name;
    bool holds = false;
    double margin = 0;  // signed distance to the boundary of the condition
};

struct TwoFoldCertificate {
    bool passes = false;
    double nu = 0;  // X^sl(0) = (det Z)'(0) / d/dx (Y+ - Y-)(0,0)
    std::vector<CertCondition> conditions;
};

enum class ZeroPosition { CornerMinus, CornerPlus, Interior };

struct SlidingZero {
    double x0 = 0;
    int multiplicity = 1;        // clamped at m_max; see at_least_m_max
    bool at_least_m_max = false; // multiplicity reported as ">= m_max"
    ZeroPosition position = ZeroPosition::Interior;
    bool even_parity = false;
};

/// det Z(x) = X-(x,0) Y+(x,0) - X+(x,0) Y-(x,0) at lambda = 0.
double det_Z(const PwsModel& model, double x);
/// det Z restricted to the axis as an exact polynomial (polynomial fields).
Poly1 det_Z_poly(const PwsModel& model);

/// Filippov sliding vector field X^sl(x) = det Z(x) / (Y+ - Y-)(x,0); at x = 0
/// returns the nu(c) limit. Throws on (Y+ - Y-)(x,0) = 0 away from the origin.
double sliding_vf(const PwsModel& model, double x, const Tolerances& tol = {});

/// Classify a switching-line point in the PWS limit (lambda = 0).
SwitchPointClass classify_switch_point(const PwsModel& model, double x,
                                       const Tolerances& tol = {});

/// Evaluate the visible-invisible two-fold conditions at the origin with
/// margins; sampled sign conditions use [-x_range, x_range].
TwoFoldCertificate certify_two_fold(const PwsModel& model, const Tolerances& tol = {},
                                    double x_range = 1.0);

/// All zeros of det Z in [a, b] with multiplicity and parity. The interval must
/// exclude a neighborhood of the two-fold at x = 0.
std::vector<SlidingZero> find_sliding_zeros(const PwsModel& model, double a, double b,
                                            const Tolerances& tol = {});

/// Multiplicity of x0 as a zero of det Z (exact polynomial derivatives when
/// available, Richardson finite differences otherwise).
SlidingZero zero_with_multiplicity(const PwsModel& model, double x0, const Tolerances& tol = {});

}  // namespace slidecyc
