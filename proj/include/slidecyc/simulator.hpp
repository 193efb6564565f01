#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slidecyc/cycle.hpp"
#include "slidecyc/model.hpp"
#include "slidecyc/ode.hpp"

namespace slidecyc {

/// Direct integration of the regularized field; stiff switching at spectral
/// radius 10/eps^2, events located on dense output.
OdeResult integrate_regularized(const PwsModel& model, const Regularization& reg,
                                const RegularizedContext& ctx, const Vec2& z0, double t_end,
                                const std::vector<EventSpec>& events = {},
                                const Tolerances& tol = {}, bool record = false);

/// Transversal section {x = 0, y in [sigma1, sigma2]}, sigma1 < s0 < sigma2 < 0,
/// crossed with decreasing x (the fast leg of the cycle).
struct ReturnMapSpec {
    double sigma1 = 0, sigma2 = 0;
    RegularizedContext ctx;
};

struct ReturnMapSample {
    double P = 0;      // first-return y
    double slope = 0;  // P'(y0) via variational equations
    double transit_time = 0;
};

/// Coarse polyline of the sliding cycle Gamma for delta-closeness monitoring.
std::vector<Vec2> gamma_polyline(const SlidingCycle& cycle, int max_points = 256);

ReturnMapSample return_map(const PwsModel& model, const Regularization& reg,
                           const ReturnMapSpec& spec, double y0,
                           const std::vector<Vec2>& gamma, const Tolerances& tol = {});

struct FixedPoint {
    double y_star = 0;
    double slope = 0;
    bool attracting = false;  // slope < 1
};

struct LimitCycleReport {
    std::vector<FixedPoint> fixed_points;
    int count = 0;
    double eps = 0, lambda_tilde = 0;
    int grid = 0;
    int evaluated = 0;  // grid points where the return map was defined
};

LimitCycleReport count_limit_cycles(const PwsModel& model, const Regularization& reg,
                                    const ReturnMapSpec& spec, const std::vector<Vec2>& gamma,
                                    int grid = 64, const Tolerances& tol = {});

// ---- Blow-up charts ----

enum class ChartTag {
    Family,        // (x2, y2, r2): x2' = r2^2 Xblend, y2' = Yblend, r2' = 0
    Family0,       // (x2, y2) at r2 = 0
    Phase,         // (x1, r1, e1): the ybar = -1 directional chart
    SecondFamily,  // (xhat2, y2): second blow-up at the two-fold, r = 0 limit
};

struct BlowupChartModel {
    ChartTag tag = ChartTag::Family;
    PwsModel model;
    Regularization reg = Regularization::arctan();
    double lambda_tilde = 0;

    /// y2-coordinate of the critical curve C at (x2, r2 = 0): the layer field
    /// zero phi^{-1}(-Y-/(Y+-Y-)(x2,0)).
    double y_C(double x2) const;
    /// Invariant-line height of the second blow-up chart.
    double y2_star() const;
};

Eigen::VectorXd chart_field(const BlowupChartModel& chart, const Eigen::VectorXd& state);

/// Eigenvalues of the phase-chart linearization at the edge point (x1, 0, 0);
/// analytically (0, -Y-(x1,0)/2, +Y-(x1,0)/2). Computed from a Richardson
/// finite-difference Jacobian of chart_field.
Eigen::Vector3d phase_edge_eigenvalues(const BlowupChartModel& chart, double x1);

/// Measured slow drift along C in the family chart at small r2, compared with
/// X^sl; returns the maximum relative deviation over the sample grid.
struct SlowDynamicsResult {
    double max_rel_deviation = 0;
    double at_x = 0;
};

SlowDynamicsResult slow_dynamics_check(const PwsModel& model, const Regularization& reg,
                                       double x_lo, double x_hi, double r2,
                                       double lambda_tilde = 0, int samples = 13,
                                       const Tolerances& tol = {});

/// Max |y2'| of the second blow-up chart on the line y2 = y2* + offset over
/// xhat2 in [-range, range].
double gamma_invariance_check(const PwsModel& model, const Regularization& reg,
                              double offset = 0, double range = 5.0, int samples = 101);

}  // namespace slidecyc
