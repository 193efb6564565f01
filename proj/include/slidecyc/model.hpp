#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "slidecyc/poly.hpp"
#include "slidecyc/regularization.hpp"

namespace slidecyc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Value and full first-order Jacobian of one smooth planar field at a point.
struct FieldEval {
    double X = 0, Y = 0;
    double dXdx = 0, dXdy = 0, dYdx = 0, dYdy = 0;
    Vec2 value() const { return {X, Y}; }
    Mat2 jacobian() const {
        Mat2 J;
        J << dXdx, dXdy, dYdx, dYdy;
        return J;
    }
    double divergence() const { return dXdx + dYdy; }
};

/// One smooth planar vector field Z = (X, Y), parameterized by lambda.
/// Polynomial representation: each component is P0(x,y) + lambda * P1(x,y),
/// so all first-order derivatives are exact. Callback fields supply their own
/// Jacobian.
class SmoothField {
public:
    using Callback = std::function<FieldEval(double x, double y, double lambda)>;

    SmoothField() = default;

    static SmoothField polynomial(Poly2 X, Poly2 Y, Poly2 X_lambda = Poly2(),
                                  Poly2 Y_lambda = Poly2()) {
        SmoothField f;
        f.X_ = std::move(X);
        f.Y_ = std::move(Y);
        f.Xl_ = std::move(X_lambda);
        f.Yl_ = std::move(Y_lambda);
        f.dXdx_ = f.X_.dx();
        f.dXdy_ = f.X_.dy();
        f.dYdx_ = f.Y_.dx();
        f.dYdy_ = f.Y_.dy();
        f.dXldx_ = f.Xl_.dx();
        f.dXldy_ = f.Xl_.dy();
        f.dYldx_ = f.Yl_.dx();
        f.dYldy_ = f.Yl_.dy();
        f.is_poly_ = true;
        return f;
    }

    static SmoothField callback(Callback cb) {
        SmoothField f;
        f.cb_ = std::move(cb);
        f.is_poly_ = false;
        return f;
    }

    bool is_polynomial() const { return is_poly_; }

    FieldEval eval(double x, double y, double lambda = 0.0) const {
        if (!is_poly_) return cb_(x, y, lambda);
        FieldEval e;
        e.X = X_(x, y) + lambda * Xl_(x, y);
        e.Y = Y_(x, y) + lambda * Yl_(x, y);
        e.dXdx = dXdx_(x, y) + lambda * dXldx_(x, y);
        e.dXdy = dXdy_(x, y) + lambda * dXldy_(x, y);
        e.dYdx = dYdx_(x, y) + lambda * dYldx_(x, y);
        e.dYdy = dYdy_(x, y) + lambda * dYldy_(x, y);
        return e;
    }

    /// Restrictions to {y=0, lambda=0}; only for polynomial fields.
    Poly1 X_on_axis() const { require_poly(); return X_.at_y0(); }
    Poly1 Y_on_axis() const { require_poly(); return Y_.at_y0(); }
    Poly1 dYdx_on_axis() const { require_poly(); return dYdx_.at_y0(); }

    const Poly2& X_poly() const { require_poly(); return X_; }
    const Poly2& Y_poly() const { require_poly(); return Y_; }

private:
    void require_poly() const {
        if (!is_poly_) throw std::logic_error("operation requires a polynomial field");
    }
    bool is_poly_ = false;
    Poly2 X_, Y_, Xl_, Yl_;
    Poly2 dXdx_, dXdy_, dYdx_, dYdy_;
    Poly2 dXldx_, dXldy_, dYldx_, dYldy_;
    Callback cb_;
};

/// Piecewise smooth model: upper field Z+ in {y>0}, lower field Z- in {y<0},
/// switching line fixed at {y = 0}. The lambda coupling follows the rescaling
/// lambda = eps * lambda_tilde.
struct PwsModel {
    SmoothField upper;  // Z+
    SmoothField lower;  // Z-
    Eigen::VectorXd c;   // current parameter point
    Eigen::VectorXd c0;  // reference parameter point
    // Optional rebuild hook: fields as a function of c (c-sweeps, certificates).
    std::function<std::pair<SmoothField, SmoothField>(const Eigen::VectorXd&)> rebuild;

    PwsModel at(const Eigen::VectorXd& cnew) const {
        if (!rebuild) throw std::logic_error("model has no parameter rebuild rule");
        PwsModel m = *this;
        auto [up, lo] = rebuild(cnew);
        m.upper = std::move(up);
        m.lower = std::move(lo);
        m.c = cnew;
        return m;
    }
};

/// Scale parameters of the regularized family.
struct RegularizedContext {
    double eps = 0.0;          // eps > 0 for simulation; 0 only for limit objects
    double lambda_tilde = 0.0; // breaking parameter
    double s_max = 50.0;       // tail saturation threshold for phi's argument

    double lambda() const { return eps * lambda_tilde; }
};

/// Numerical tolerances used throughout; values are the artifact-wide defaults.
struct Tolerances {
    double tau_sw = 1e-10;     // switch-class sign margin
    double tau_mult = 1e-8;    // multiplicity threshold (scaled by derivative magnitude)
    double tau_margin = 1e-8;  // certificate margin
    double quad_rel = 1e-10;   // quadrature relative target
    double ode_abs = 1e-10;
    double ode_rel = 1e-10;
    double event_tol = 1e-12;
    int grid_nodes = 2048;
    int m_max = 4;
    double t_max = 100.0;
    double box = 10.0;              // bounding box half-width for A3 checks
    double delta_hausdorff = 0.3;   // cycle-closeness radius
};

/// Z+(z) phi(y/eps^2) + Z-(z) (1 - phi(y/eps^2)) with lambda = eps*lambda_tilde.
/// In the saturated tail |y/eps^2| > s_max, phi is replaced by exactly 1 or 0.
Vec2 eval_regularized(const PwsModel& model, const Regularization& reg,
                      const RegularizedContext& ctx, const Vec2& z);

/// Exact Jacobian of eval_regularized, including the phi'(y/eps^2)/eps^2 chain
/// terms; returns {J, trace(J)}.
std::pair<Mat2, double> jacobian_regularized(const PwsModel& model, const Regularization& reg,
                                             const RegularizedContext& ctx, const Vec2& z);

}  // namespace slidecyc
