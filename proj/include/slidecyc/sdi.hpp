#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slidecyc/cycle.hpp"
#include "slidecyc/filippov.hpp"
#include "slidecyc/model.hpp"

namespace slidecyc {

/// Scalar that may be -infinity with a reason (divergent slow divergence
/// integral through a sliding zero).
struct SdiValue {
    double value = 0;
    bool divergent = false;           // value is -inf; see blamed_zero
    double blamed_zero = 0;           // sliding zero inside the path
    double error_estimate = 0;

    bool finite() const { return !divergent; }
};

struct SdiEvaluation {
    SdiValue I, I_minus, I_plus;
    double dIdx = 0;
    std::optional<int> mult_I_at_eta_plus;
    std::optional<int> mult_dIdx_at_eta_plus;
};

/// Integrand of the slow divergence integral at abscissa s:
///   (Y+ - Y-)^2 / det Z * phi'(phi^{-1}(-Y- / (Y+ - Y-)))   on {y=0}.
/// The apparent singularity at s = 0 is removable (value 0).
double sdi_integrand(const PwsModel& model, const Regularization& reg, double s,
                     const Tolerances& tol = {});

/// I(x) over [Pi(x), x]; Divergent(-inf) when a sliding zero lies inside the
/// open integration path.
SdiValue sdi_I(const PwsModel& model, const Regularization& reg, double x,
               const Tolerances& tol = {});

/// One-sided integrals over [x, 0]: I-(x) for x < 0, I+(x) for x > 0.
SdiValue sdi_I_minus(const PwsModel& model, const Regularization& reg, double x,
                     const Tolerances& tol = {});
SdiValue sdi_I_plus(const PwsModel& model, const Regularization& reg, double x,
                    const Tolerances& tol = {});

/// Pointwise dI/dx via the two-term closed form (no quadrature); Pi and Pi'
/// come from the half map.
double sdi_dIdx(const PwsModel& model, const Regularization& reg, double x,
                const Tolerances& tol = {});

/// Multiplicity bookkeeping for x -> I(x) and x -> dI/dx at a given abscissa
/// (used by the cyclicity verdicts). Only meaningful when I is finite nearby.
SdiEvaluation sdi_evaluate(const PwsModel& model, const Regularization& reg, double x,
                           const Tolerances& tol = {});

/// Target section for orbit divergence integrals.
struct SectionSpec {
    std::function<double(const Vec2&)> g;  // section = {g = 0}
    int direction = 0;                     // +1 / -1 / 0, as in EventSpec
    std::function<bool(const Vec2&)> accept;

    static SectionSpec x_equals(double x0, int dir = 0);
    static SectionSpec y_equals(double y0, int dir = 0);
};

/// Orbit divergence integral eps^2 * int div Z_eps dt along the regularized
/// orbit from `start` until it reaches the target section. A start already on
/// the section gives 0.
struct OrbitDivergence {
    double I_tilde = 0;
    double eps = 0;
    Vec2 end{0, 0};
    double transit_time = 0;
    std::vector<OrbitPoint> orbit;
};

OrbitDivergence orbit_divergence_integral(const PwsModel& model, const Regularization& reg,
                                          const RegularizedContext& ctx, const Vec2& start,
                                          const SectionSpec& target,
                                          const Tolerances& tol = {});

}  // namespace slidecyc
