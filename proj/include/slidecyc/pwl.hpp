#pragma once

#include <optional>
#include <string>

#include "slidecyc/model.hpp"
#include "slidecyc/regularization.hpp"

namespace slidecyc {

/// Canonical piecewise-linear family:
///   Z- = (-1 + d- y, -x + t- y),  Z+ = (b+ + a11 x + a12 y, a21 x + a22 y),
/// admissible when b+ > a21 > 0. The breaking parameter enters additively in
/// the Y+ component: Y+ -> Y+ + lambda.
struct PwlCoefficients {
    double d_minus = 0, t_minus = 0;
    double b_plus = 2, a11 = 1, a12 = 0, a21 = 1, a22 = 0;

    static PwlCoefficients canonical() { return {}; }
};

PwsModel build_pwl(const PwlCoefficients& k);

/// Phase portrait of the lower field as a function of (d-, t-).
struct LowerFieldPortrait {
    enum class Kind {
        InvariantLine,  // d- = 0, t- != 0: line x = t- y + 1/t-
        Parabolas,      // d- = t- = 0
        Saddle,         // d- < 0
        Node,           // d- > 0, (t-)^2 - 4 d- >= 0
        Focus,          // d- > 0, (t-)^2 - 4 d- < 0, t- != 0
        Center,         // d- > 0, (t-)^2 - 4 d- < 0, t- = 0
    };
    Kind kind;
    std::optional<double> kappa_minus, kappa_plus;  // eigenvalues, when real
    std::optional<double> x_L, x_R;                 // manifold hits on {y=0}
    std::optional<Vec2> P;                          // singularity, d- != 0
    bool repelling = false;                         // node/focus orientation (t- > 0)
};

LowerFieldPortrait portrait(const PwlCoefficients& k);

/// Corner-singularity case detection for the PWL family: matches the
/// configuration taxonomy on (portrait, corner position x*) and returns the
/// figure tag I..X together with the bound-1 verdict. Strict inequalities;
/// boundary or non-corner configurations give "not applicable".
struct PwlCaseVerdict {
    std::string figure_case;  // "I".."X" or "not applicable: <reason>"
    bool applicable = false;
    int bound = 1;
    bool attracting = false;  // iff a11 > 0
};

PwlCaseVerdict thm_appl_case(const PwlCoefficients& k, double eta_minus, double eta_plus,
                             const Tolerances& tol = {});

/// Closed forms on the integrable parabola subfamily (d- = t- = 0):
/// Pi(x) = -x, Pi' = -1, and the SDI antiderivative.
struct PwlClosedForms {
    double Pi, dPi, s0, I, dIdx;
    bool I_divergent = false;
};

PwlClosedForms closed_form_oracles(const PwlCoefficients& k, const Regularization& reg, double x);

}  // namespace slidecyc
