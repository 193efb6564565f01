#pragma once

#include <optional>
#include <string>

#include "slidecyc/cycle.hpp"
#include "slidecyc/model.hpp"
#include "slidecyc/sdi.hpp"

namespace slidecyc {

/// Slow/fast eigenvalue ratio data at a simple corner zero x0 of X^sl:
///   rho = |(X^sl)'(x0)| / |(Y+ - Y-)(x0,0) * phi'(y_C(x0))|,
/// with y_C(x) = phi^{-1}(-Y-/(Y+-Y-)(x,0)). The regularized system has a
/// hyperbolic saddle near (x0, eps^2 y_C(x0)) with eigenvalue ratio -eps^2 rho.
double corner_rho(const PwsModel& model, const Regularization& reg, double x0,
                  const Tolerances& tol = {});

/// Direct validation: locate the saddle of the regularized field near the
/// corner by Newton iteration and compare the measured Jacobian eigenvalue
/// ratio with -eps^2 rho (10% relative acceptance).
struct RhoValidation {
    double measured_ratio = 0;  // slow/fast eigenvalue ratio of the located saddle
    double predicted = 0;       // -eps^2 rho
    double rel_err = 0;
    bool ok = false;
    Vec2 saddle{0, 0};
};

RhoValidation validate_corner_rho(const PwsModel& model, const Regularization& reg, double x0,
                                  double rho, double eps, const Tolerances& tol = {});

struct CornerSaddleData {
    double rho_minus = 0, rho_plus = 0;
    std::optional<RhoValidation> validated_minus, validated_plus;

    bool validation_failed() const {
        return (validated_minus && !validated_minus->ok) ||
               (validated_plus && !validated_plus->ok);
    }
};

CornerSaddleData corner_saddle_data(const PwsModel& model, const Regularization& reg,
                                    const SlidingCycle& cycle, double validation_eps = 0,
                                    const Tolerances& tol = {});

enum class Stability { Attracting, Repelling, Unspecified };

struct CyclicityVerdict {
    enum class Kind { Bound, NoLimitCycles, Uncovered };
    Kind kind = Kind::Bound;
    int bound = 0;             // valid when kind == Bound
    Stability stability = Stability::Unspecified;
    std::string theorem;       // which statement produced the bound
    std::string inputs_used;
    std::string explanation;

    std::string bound_string() const;
};

/// Dispatch on the case label and numerical data; throws "insufficient data"
/// naming the missing inputs.
CyclicityVerdict cyclicity_bound(const CaseLabel& label, const SlidingCycle& cycle,
                                 const std::optional<SdiEvaluation>& sdi,
                                 const std::optional<CornerSaddleData>& saddle,
                                 const Tolerances& tol = {});

}  // namespace slidecyc
